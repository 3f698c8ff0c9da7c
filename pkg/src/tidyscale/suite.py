"""Seeded executable checks of the structure theory across the families.

Every check is a case generator plus an exact assertion.  Case ``k`` of
check ``C`` under seed ``s`` draws from ``random.Random(f"{C}:{s}:{k}")``, so
reruns reproduce cases and reports byte for byte.  Claims about closures and
boundedness are restated as equalities of exact predicates on representable
elements or of constraint descriptions before they are asserted.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from . import arith, core, coset_tree, tree
from .core import Target
from .errors import UnsupportedError, ValidationError
from .finite_groups import group_by_name, named_subgroup
from .matrix import (
    MatrixFamily,
    ValuationShape,
    levi_factorization,
    make_element,
    matrix_scale,
    membership_predicates,
    scale_via_newton,
)
from .shift import QuotientSpec, ShiftElement, ShiftFamily, correcting_element, quotient_push

SCHEMA = "tidyscale.suite-report/1"
DEFAULT_CASES = 50
INF = arith.INF

SHIFT_CONFIGS = {
    "shift:S3/A3": ("S3", "A3", "A3"),
    "shift:C4/C2": ("C4", "C2", "C2"),
    "shift:D4/center": ("D4", "center", "center"),
}
MATRIX_CONFIGS = {"matrix:p=2": 2, "matrix:p=3": 3, "matrix:p=5": 5}
TREE_CONFIGS = {"tree:q=2": 2, "tree:q=3": 3}


# --------------------------------------------------------------------------
# generators


@lru_cache(maxsize=None)
def shift_setup(config: str):
    Fname, Oname, Kname = SHIFT_CONFIGS[config]
    F = group_by_name(Fname)
    O = named_subgroup(F, Oname)
    K = named_subgroup(F, Kname)
    return F, O, K, tuple(F.all_subgroups()), tuple(F.subgroups_of(O))


def shift_family(config: str, n: int = 1) -> ShiftFamily:
    F, O, *_ = shift_setup(config)
    return ShiftFamily(F, O, n)


def random_product_subgroup(fam: ShiftFamily, rng: random.Random, pool=None, width: int = 4, proper: bool = False):
    """Constraints drawn from ``pool`` (default: every subgroup of F) on a random window."""
    pool = list(pool if pool is not None else fam.F.all_subgroups())
    lo = rng.randint(-3, 3)
    cons = {i: rng.choice(pool) for i in range(lo, lo + rng.randint(1, width))}
    if proper:
        smaller = [h for h in pool if h < fam.O]
        cons[rng.choice(sorted(cons))] = rng.choice(smaller)
    return fam.subgroup(cons)


def random_shift_element(fam: ShiftFamily, rng: random.Random, values=None, size: int = 4, spread: int = 6) -> ShiftElement:
    values = sorted(values if values is not None else fam.F.elements())
    coords = rng.sample(range(-spread, spread + 1), rng.randint(0, size))
    return fam.element({i: rng.choice(values) for i in coords})


def _unit(rng: random.Random, p: int) -> int:
    while True:
        u = rng.choice([1, -1]) * rng.randint(1, 2 * p)
        if u % p:
            return u


def random_valuations(rng: random.Random, n: int, p: int, equal: bool = False) -> list[int]:
    r = 1 if p >= 5 else 2
    if equal:
        return [rng.randint(-r, r)] * n
    return [rng.randint(-r, r) for _ in range(n)]


def diag_from_valuations(rng: random.Random, v, p: int) -> list[Fraction]:
    return [Fraction(_unit(rng, p)) * Fraction(p) ** k for k in v]


def random_matrix_family(rng: random.Random, p: int, n: int | None = None, v=None, conjugate: bool | None = None) -> MatrixFamily:
    """Diagonalizable ``g = C D C^{-1}`` with a random unitriangular ``C`` half of the time."""
    n = n or rng.choice([2, 3])
    v = v if v is not None else random_valuations(rng, n, p)
    D = arith.diagonal(diag_from_valuations(rng, v, p))
    if conjugate is None:
        conjugate = rng.random() < 0.5
    if not conjugate:
        return MatrixFamily(make_element(D, p))
    C = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            C[i][j] = Fraction(rng.randint(-3, 3))
    C = arith.as_matrix(C)
    g = arith.matmul(arith.matmul(C, D), arith.inverse(C))
    return MatrixFamily(make_element(g, p, conjugator=C))


def random_shape(fam: MatrixFamily, rng: random.Random, allowed=None, hi: int = 3) -> ValuationShape:
    """Random valid shape, closed under ``S_ij <= S_il + S_lj`` by min-plus closure.

    Off-diagonal entries are ``c_i - c_j + r_ij`` with ``r_ij >= 1``, so every
    cycle has weight at least 1 and the diagonal stays ``>= 1``.  ``allowed(i, j)``
    False forces ``N_ij = 0``.
    """
    n = fam.n
    c = [rng.randint(-2, 2) for _ in range(n)]
    S = [[INF] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if allowed is None or allowed(i, j):
                S[i][j] = rng.randint(1, hi) if i == j else c[i] - c[j] + rng.randint(1, hi)
    for l in range(n):
        for i in range(n):
            for j in range(n):
                if S[i][l] + S[l][j] < S[i][j]:
                    S[i][j] = S[i][l] + S[l][j]
    return fam.shape(S)


def random_tree_element(rng: random.Random, q: int, hyperbolic: bool) -> tree.TreeElement:
    """Structured element; hyperbolic ones translate the standard axis by ``l in 1..3``."""
    deco = {}
    for _ in range(rng.randint(0, 3)):
        t = rng.randint(-2, 2)
        w = () if rng.random() < 0.4 else (rng.randint(1, q - 1),) + tuple(rng.randint(0, q - 1) for _ in range(rng.randint(0, 1)))
        perm = list(range(q))
        rng.shuffle(perm)
        if hyperbolic and not w:
            rest = perm[1:] if perm[0] == 0 else [x for x in perm if x != 0]
            perm = [0] + rest
        deco[(t, w)] = tuple(perm)
    s = rng.choice([1, 2, 3]) if hyperbolic else 0
    return tree.TreeElement.make(q, s, deco)


# --------------------------------------------------------------------------
# cases and checks


@dataclass
class CheckCase:
    check: str
    config: str
    seed: int
    case: int
    params: dict
    ok: bool
    witness: object = None

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "config": self.config,
            "seed": self.seed,
            "case": self.case,
            "params": core.jsonable(self.params),
            "ok": self.ok,
            "witness": core.jsonable(self.witness),
        }


@dataclass(frozen=True)
class Check:
    id: str
    name: str
    claim: str
    configs: tuple[str, ...]
    run: Callable


@dataclass
class CheckResult:
    id: str
    name: str
    claim: str
    cases: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [c for c in self.cases if not c.ok]

    @property
    def passed(self) -> bool:
        return bool(self.cases) and not self.failures

    def to_json(self) -> dict:
        fails = self.failures
        return {
            "id": self.id,
            "name": self.name,
            "claim": self.claim,
            "cases": len(self.cases),
            "failures": len(fails),
            "passed": self.passed,
            "first_failure": fails[0].to_json() if fails else None,
        }


def _ok(params, witness=None):
    return True, params, witness


def _fail(params, witness):
    return False, params, witness


# ---- C1: V_-- = U V_0 (shift)


def c1_factorization(rng, config):
    fam = shift_family(config, rng.choice([1, 2, -1]))
    F = fam.F
    V = random_product_subgroup(fam, rng)
    v0 = fam.zero(V)
    params = {"V": fam.describe(V), "n": fam.n}
    for _ in range(8):
        x = random_shift_element(fam, rng)
        lhs = fam.in_vminusminus(x, V)
        # x = u v0 coordinate-wise: u_i = x_i v_i^{-1} must pass the U predicate
        rhs = all(any(F.mul(a, F.inv(h)) in fam.O for h in v0.at(i)) for i, a in x.items)
        if rhs:
            u = fam.element({i: next(F.mul(a, F.inv(h)) for h in sorted(v0.at(i)) if F.mul(a, F.inv(h)) in fam.O) for i, a in x.items})
            v = fam.mul(fam.inv(u), x)
            rhs = core.membership(fam, u, Target.U).yes and fam.member(v, v0) and fam.mul(u, v) == x
        if lhs != rhs:
            return _fail(params, {"x": fam.describe_element(x), "in_V--": lhs, "factors": rhs})
    return _ok(params)


# ---- C2: M U = P (matrix)


def _random_parabolic(fam: MatrixFamily, rng) -> arith.Matrix:
    n, v, p = fam.n, fam.v, fam.p
    while True:
        y = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if v[i] == v[j]:
                    y[i][j] = Fraction(rng.randint(-3, 3))
                elif v[i] > v[j]:
                    y[i][j] = Fraction(rng.randint(-4, 4), p ** rng.randint(0, 2))
        y = arith.as_matrix(y)
        if arith.determinant(y) != 0:
            return fam.from_eigen(y)


def c2_levi(rng, config):
    fam = random_matrix_family(rng, MATRIX_CONFIGS[config])
    x = _random_parabolic(fam, rng)
    params = {"g": fam.parameters(), "x": arith.format_matrix(x)}
    if not membership_predicates(fam, x, Target.P).yes:
        return _fail(params, "generated element is not parabolic")
    m, u = levi_factorization(fam, x)
    if arith.matmul(m, u) != x:
        return _fail(params, {"m": arith.format_matrix(m), "u": arith.format_matrix(u)})
    if not (membership_predicates(fam, m, Target.M).yes and membership_predicates(fam, u, Target.U).yes):
        return _fail(params, "factors fail the M / U predicates")
    # the other inclusion, and uniqueness of the factors
    m2, u2 = levi_factorization(fam, arith.matmul(m, u))
    if (m2, u2) != (m, u):
        return _fail(params, "factorization is not unique")
    return _ok(params)


# ---- C3: s_H(alpha^-1) = Δ_H(alpha^-1) on H = closure of U


def c3_scale_is_modular(rng, config):
    if config.startswith("shift"):
        fam = shift_family(config, rng.choice([1, 2, -1, -3]))
        _, O, _, _, subs = shift_setup(config)
        W = random_product_subgroup(fam, rng, pool=subs)
        delta = core.modular_value(fam, W, -1)
        s_h = core.tidy(fam.inverse(), fam.all_O()).scale
        s_g = core.scale_inverse(fam).value
        params = {"n": fam.n, "W": fam.describe(W)}
    else:
        fam = random_matrix_family(rng, MATRIX_CONFIGS[config])
        d = fam.d
        in_u = lambda i, j: d[i][j] > 0  # noqa: E731
        W = random_shape(fam, rng, in_u)
        delta = core.modular_value(fam, W, -1)
        tidy_w = fam.shape([[1 if in_u(i, j) else INF for j in range(fam.n)] for i in range(fam.n)])
        s_h = fam.index(fam.image(tidy_w, -1), tidy_w)
        s_g = scale_via_newton(fam.g.inverse().entries, fam.p).value
        params = {"g": fam.parameters(), "W": W.to_json()}
    params.update(delta=str(delta), s_H=s_h, s_G=s_g)
    if not (delta == s_h == s_g):
        return _fail(params, "modular value, restricted scale and ambient scale differ")
    return _ok(params)


# ---- C4: s_H = s_{H/N} s_N (shift, N from a quotient)


def c4_multiplicative(rng, config):
    F, O, K, _, subs = shift_setup(config)
    n = rng.choice([1, 2, -1, -2])
    Q = QuotientSpec.make(F, O, K)
    famH, famQ = Q.family(n)
    famN = ShiftFamily(F, K, n)
    W = random_product_subgroup(famH, rng, pool=subs)
    win = range(W.lo, W.hi)
    WN = famN.subgroup({i: W.at(i) & K for i in win})
    WQ = famQ.subgroup({i: {Q.proj[a] for a in W.at(i)} for i in win})
    deltas = [core.modular_value(f, w, -1) for f, w in ((famH, W), (famQ, WQ), (famN, WN))]
    scales = [core.tidy(f.inverse(), w).scale for f, w in ((famH, W), (famQ, WQ), (famN, WN))]
    params = {"n": n, "W": famH.describe(W), "delta": [str(x) for x in deltas], "scales": scales}
    if deltas[0] != deltas[1] * deltas[2] or scales[0] != scales[1] * scales[2] or deltas != scales:
        return _fail(params, "s_H != s_{H/N} s_N")
    return _ok(params)


# ---- C5: s(alpha beta) <= s(alpha) s(beta) for commuting diagonals


def c5_submultiplicative(rng, config):
    p = MATRIX_CONFIGS[config]
    n = rng.choice([2, 3])
    v1 = random_valuations(rng, n, p)
    if rng.random() < 0.5:
        # same ordering as v1
        c = rng.randint(0, 2)
        v2 = [c * a + rng.choice([0, 0, 1]) * (a - min(v1)) for a in v1]
    else:
        v2 = random_valuations(rng, n, p)
    g1 = make_element(arith.diagonal(diag_from_valuations(rng, v1, p)), p)
    g2 = make_element(arith.diagonal(diag_from_valuations(rng, v2, p)), p)
    g12 = make_element(arith.matmul(g1.entries, g2.entries), p)
    s1, s2, s12 = (matrix_scale(g).value for g in (g1, g2, g12))
    consistent = all((v1[i] - v1[j]) * (v2[i] - v2[j]) >= 0 for i in range(n) for j in range(n))
    params = {"v1": v1, "v2": v2, "s1": s1, "s2": s2, "s12": s12, "consistent": consistent}
    if s12 > s1 * s2 or (consistent and s12 != s1 * s2):
        return _fail(params, "submultiplicativity or its equality case fails")
    return _ok(params)


# ---- C6: s(alpha^-1) = 1 iff U bounded


def c6_bounded_iff(rng, config):
    if config.startswith("matrix"):
        p = MATRIX_CONFIGS[config]
        n = rng.choice([2, 3])
        fam = random_matrix_family(rng, p, n, random_valuations(rng, n, p, equal=rng.random() < 0.3))
        s_inv = scale_via_newton(fam.g.inverse().entries, p).value
        # U is generated by elementary matrices; unbounded iff some I + c E_ij lies in U
        # for every c, since then the entry valuations run off to -infinity
        unbounded = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                family_ok = True
                for k in range(6):
                    y = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
                    y[i][j] = Fraction(1, p**k)
                    if not membership_predicates(fam, fam.from_eigen(arith.as_matrix(y)), Target.U).yes:
                        family_ok = False
                        break
                unbounded = unbounded or family_ok
        params = {"g": fam.parameters(), "s_inverse": s_inv, "U_unbounded": unbounded}
    elif config.startswith("shift"):
        fam = shift_family(config, rng.choice([1, -1, 2]))
        s_inv = core.scale_inverse(fam).value
        members = [x for x in (random_shift_element(fam, rng) for _ in range(20)) if core.membership(fam, x, Target.U).yes]
        # every U-member lies in the compact subgroup O^Z
        unbounded = not all(fam.member(x, fam.all_O()) for x in members)
        params = {"n": fam.n, "s_inverse": s_inv, "U_unbounded": unbounded, "members": len(members)}
    else:
        q = TREE_CONFIGS[config]
        hyper = rng.random() < 0.6
        g = random_tree_element(rng, q, hyper)
        fam = tree.TreeFamily(g)
        s_inv = core.scale_inverse(fam).value
        # swapping children 0 and 1 at a(-t) moves the root a distance 2t
        disp = []
        for t in range(1, 6):
            perm = list(range(q))
            perm[0], perm[1] = 1, 0
            x = tree.TreeElement.make(q, 0, {tree.axis(-t): tuple(perm)})
            if core.membership(fam, x, Target.U).yes:
                disp.append(tree.distance(tree.ROOT, x(tree.ROOT)))
        unbounded = len(disp) == 5 and disp == sorted(disp) and disp[-1] > disp[0]
        params = {"g": g.to_json(), "s_inverse": s_inv, "U_unbounded": unbounded}
    if (s_inv == 1) == unbounded:
        return _fail(params, "s(alpha^-1) = 1 does not match boundedness of U")
    return _ok(params)


# ---- C7: V_++ ∩ V_-- = V_0 exactly when V is tidy (shift)


def c7_u0(rng, config):
    fam = shift_family(config, rng.choice([1, 2, -1]))
    V = random_product_subgroup(fam, rng)
    W, k = core.tidying_step1(fam, V)
    tidy_ok = core.is_tidy(fam, W).ok
    v0 = fam.zero(W)
    params = {"V": fam.describe(V), "k": k, "tidy": tidy_ok}
    # on representables V_++ ∩ V_-- is cut out by the constraint O at every coordinate
    witness = None
    for i in fam.all_O().span(v0):
        extra = sorted(fam.O - v0.at(i))
        if extra:
            x = fam.element({i: extra[0]})
            if fam.in_vplusplus(x, W) and fam.in_vminusminus(x, W) and not fam.member(x, v0):
                witness = fam.describe_element(x)
                break
    equal = witness is None and fam.same(v0, fam.all_O())
    for _ in range(6):
        x = random_shift_element(fam, rng)
        both = fam.in_vplusplus(x, W) and fam.in_vminusminus(x, W)
        if equal and both != fam.member(x, v0):
            return _fail(params, {"x": fam.describe_element(x)})
    if equal != tidy_ok:
        return _fail(params, {"equality": equal, "witness": witness})
    # U_0 is the intersection of the tidy subgroups; here the only one is O^Z
    tidy_v = core.tidy(fam, V).output
    for _ in range(6):
        x = random_shift_element(fam, rng)
        if core.membership(fam, x, Target.U0).yes != fam.member(x, tidy_v):
            return _fail(params, {"U0": fam.describe_element(x)})
    return _ok(params, witness)


# ---- C8: U_{alpha/H} = U_alpha H (shift)


def c8_quotient(rng, config):
    F, O, K, _, _ = shift_setup(config)
    n = rng.choice([1, 2, -1])
    Q = QuotientSpec.make(F, O, K)
    up, down = Q.family(n)
    OK = F.product_set(O, K)
    for _ in range(6):
        x = random_shift_element(up, rng, size=3, spread=4)
        below = core.membership(down, quotient_push(x, Q), Target.U).yes
        h = correcting_element(x, Q)
        corrected = h is not None and core.membership(up, up.mul(x, h), Target.U).yes
        direct = all(a in OK for _, a in x.items)
        if not (below == corrected == direct):
            return _fail({"n": n}, {"x": up.describe_element(x), "quotient": below, "corrected": corrected, "in_OK": direct})
    return _ok({"n": n, "K": sorted(F.label(a) for a in K)})


# ---- C9: closure of U = U_0 U (shift)


def c9_closure_factor(rng, config):
    fam = shift_family(config, rng.choice([1, -2, 3]))
    F = fam.F
    tidy_v = core.tidy(fam, random_product_subgroup(fam, rng)).output
    for _ in range(8):
        x = random_shift_element(fam, rng)
        # closure of U = ⋂ V_-- over tidy V
        closure = fam.in_vminusminus(x, tidy_v)
        # x = a u with a ∈ U_0 and u ∈ U, searched coordinate by coordinate
        factor = None
        coords = {}
        for i, val in x.items:
            hit = next((a for a in sorted(F.elements()) if a in fam.O and F.mul(F.inv(a), val) in fam.O), None)
            if hit is None:
                break
            coords[i] = hit
        else:
            a = fam.element(coords)
            u = fam.mul(fam.inv(a), x)
            if core.membership(fam, a, Target.U0).yes and core.membership(fam, u, Target.U).yes:
                factor = True
        if closure != bool(factor):
            return _fail({"n": fam.n}, {"x": fam.describe_element(x), "closure": closure, "factored": bool(factor)})
    return _ok({"n": fam.n})


# ---- C10: (T1) and U_0 <= V imply tidy


def c10_t1_u0(rng, config):
    if config.startswith("shift"):
        fam = shift_family(config, rng.choice([1, 2, -1]))
        W, k = core.tidying_step1(fam, random_product_subgroup(fam, rng))
        contains_u0 = fam.contains(W, fam.all_O())
        tidy_ok = core.is_tidy(fam, W).ok
        params = {"W": fam.describe(W), "k": k, "contains_U0": contains_u0, "tidy": tidy_ok}
        # U_0 = O^Z is contained in every tidy subgroup, so the implication is an equivalence here
        if contains_u0 != tidy_ok:
            return _fail(params, "(T1) and U_0 <= V do not match tidiness")
        if tidy_ok and core.displacement_index(fam, W) != 1:
            return _fail(params, "tidy subgroup does not minimize the displacement index")
        return _ok(params)
    fam = random_matrix_family(rng, MATRIX_CONFIGS[config], n=2 if MATRIX_CONFIGS[config] == 5 else None)
    V = random_shape(fam, rng)
    W, k = core.tidying_step1(fam, V)
    # U_0 = {1} lies in every shape; tidiness is witnessed by minimal displacement
    s = scale_via_newton(fam.g.entries, fam.p).value
    disp = core.displacement_index(fam, W)
    params = {"g": fam.parameters(), "V": V.to_json(), "k": k, "displacement": disp, "scale": s}
    if not (fam.check_t1(W).ok and fam.member(fam.identity(), W)):
        return _fail(params, "step 1 output lacks (T1)")
    if disp != s:
        return _fail(params, "(T1) subgroup containing U_0 is not tidy")
    return _ok(params)


# ---- C11: arbitrarily small tidy subgroups iff U closed


def c11_small_tidy(rng, config):
    if config.startswith("matrix"):
        fam = random_matrix_family(rng, MATRIX_CONFIGS[config], n=2 if MATRIX_CONFIGS[config] == 5 else None)
        s = scale_via_newton(fam.g.entries, fam.p).value
        for k in range(1, 6):
            V = fam.level(k)
            if not core.is_tidy(fam, V).ok or core.displacement_index(fam, V) != s:
                return _fail({"g": fam.parameters()}, {"level": k})
        # U ∩ M = 1: a parabolic element passing both predicates is the identity
        for _ in range(6):
            x = _random_parabolic(fam, rng)
            both = membership_predicates(fam, x, Target.U).yes and membership_predicates(fam, x, Target.M).yes
            if both and x != fam.identity():
                return _fail({"g": fam.parameters()}, {"U∩M": arith.format_matrix(x)})
        return _ok({"g": fam.parameters(), "levels": [1, 5]})
    fam = shift_family(config, rng.choice([1, 2, -1]))
    _, _, _, _, subs = shift_setup(config)
    W = random_product_subgroup(fam, rng, pool=subs, proper=True)
    params = {"W": fam.describe(W)}
    if core.is_tidy(fam, W).ok:
        return _fail(params, "a proper subgroup of O^Z was certified tidy")
    if not fam.same(core.tidy(fam, W).output, fam.all_O()):
        return _fail(params, "tidying a proper subgroup did not return O^Z")
    # the other side of the dichotomy: U ∩ M != 1, witnessed by one coordinate in O
    o = next(a for a in sorted(fam.O) if a != fam.F.identity)
    x = fam.element({rng.randint(-3, 3): o})
    if not (core.membership(fam, x, Target.U).yes and core.membership(fam, x, Target.M).yes):
        return _fail(params, {"U∩M witness rejected": fam.describe_element(x)})
    return _ok(params)


# ---- C12: coset tree structure


def c12_tree(rng, config):
    if config.startswith("shift"):
        fam = shift_family(config, rng.choice([1, -1, 2]))
        ad = coset_tree.ShiftCosets(fam)
        if rng.random() < 0.5:
            ad = coset_tree.InertProduct(group_by_name(rng.choice(["C2", "S3"])), ad)
        m0 = rng.randint(-3, 0)
        ball = coset_tree.build_ball(ad, m0, m0 + 6, 6)
        expected = core.scale_inverse(fam).value
    else:
        p = MATRIX_CONFIGS[config]
        gap = 1 if p == 5 else rng.choice([1, 2])
        a = rng.randint(-1, 1)
        v = [a + gap, a] if rng.random() < 0.5 else [a, a + gap]
        fam = random_matrix_family(rng, p, 2, v)
        ad = coset_tree.MatrixCosets(fam, fam.level(rng.randint(1, 2)))
        depth = 1 if p == 5 or (p == 3 and gap == 2) else 2
        m0 = rng.randint(-1, 1)
        ball = coset_tree.build_ball(ad, m0, m0 + depth + 1, depth)
        expected = scale_via_newton(fam.g.inverse().entries, p).value
    params = {"family": ad.parameters(), "vertices": len(ball.vertices), "s_inverse": ad.s_inv}
    rep = coset_tree.verify_local_structure(ball)
    if not rep.ok:
        return _fail(params, rep.violations[:3])
    if ad.s_inv != expected:
        return _fail(params, {"out_degree": ad.s_inv, "scale_inverse": expected})
    if not coset_tree.check_translation(ball):
        return _fail(params, "alpha does not translate P by one")
    bad = coset_tree.check_action(ball, 20, rng.randrange(10**6)) + coset_tree.check_stabilizer(ball, 10, rng.randrange(10**6))
    if bad:
        return _fail(params, bad[:3])
    if isinstance(ad, coset_tree.MatrixCosets):
        ends = coset_tree.end_images_distinct(ad, ball.depth)
        if not ends["ok"]:
            return _fail(params, ends)
    if isinstance(ad, coset_tree.InertProduct) and not coset_tree.kernel_acts_trivially(ball):
        return _fail(params, "the inert factor moves a vertex")
    return _ok(params)


SHIFT = tuple(SHIFT_CONFIGS)
MATRIX = tuple(MATRIX_CONFIGS)
TREE = tuple(TREE_CONFIGS)

CHECKS: dict[str, Check] = {
    c.id: c
    for c in [
        Check("C1", "factorization", "V_-- = U_alpha V_0 for every compact open V", SHIFT, c1_factorization),
        Check("C2", "levi", "M_alpha U_alpha = P_alpha", MATRIX, c2_levi),
        Check("C3", "s=Delta", "s_H(alpha^-1) = Delta_H(alpha^-1) for H the closure of U_alpha", SHIFT + MATRIX, c3_scale_is_modular),
        Check("C4", "multiplicativity", "s_H(alpha^-1) = s_{H/N}(alpha^-1) s_N(alpha^-1) for alpha-stable N <= H <= P_alpha", SHIFT, c4_multiplicative),
        Check("C5", "commuting", "s(alpha beta) <= s(alpha) s(beta) for commuting alpha, beta", MATRIX, c5_submultiplicative),
        Check("C6", "bounded-iff", "s(alpha^-1) = 1 if and only if U_alpha is bounded", SHIFT + MATRIX + TREE, c6_bounded_iff),
        Check("C7", "U0", "V_++ ∩ V_-- = V_0 for tidy V; U_0 is the intersection of the tidy subgroups", SHIFT, c7_u0),
        Check("C8", "quotient", "U_{alpha/H} = U_alpha H / H for closed alpha-stable H", SHIFT, c8_quotient),
        Check("C9", "closure-factor", "closure of U_alpha = U_0 U_alpha", SHIFT, c9_closure_factor),
        Check("C10", "T1+U0 tidiness", "a compact open V satisfying (T1) and containing U_0 is tidy", SHIFT + MATRIX, c10_t1_u0),
        Check("C11", "small-tidy dichotomy", "arbitrarily small tidy subgroups exist if and only if U_alpha is closed", SHIFT + MATRIX, c11_small_tidy),
        Check("C12", "tree theorems", "the coset tree is regular of degree s(alpha^-1)+1 and alpha translates P by one", SHIFT + MATRIX[:2], c12_tree),
    ]
}


def run_check(check_id: str, config: str | None = None, seed: int = 0, cases: int = DEFAULT_CASES) -> CheckResult:
    if check_id not in CHECKS:
        raise ValidationError(f"unknown check id {check_id!r}; known: {', '.join(CHECKS)}")
    chk = CHECKS[check_id]
    if config is not None and config not in chk.configs:
        raise UnsupportedError(f"{check_id} does not support {config!r}; supported: {', '.join(chk.configs)}")
    configs = (config,) if config else chk.configs
    result = CheckResult(chk.id, chk.name, chk.claim)
    for k in range(cases):
        cfg = configs[k % len(configs)]
        rng = random.Random(f"{check_id}:{seed}:{k}")
        try:
            ok, params, witness = chk.run(rng, cfg)
        except Exception as exc:  # a crash is a failed case with the error as witness
            ok, params, witness = False, {}, f"{type(exc).__name__}: {exc}"
        result.cases.append(CheckCase(check_id, cfg, seed, k, params, ok, witness))
    return result


# --------------------------------------------------------------------------
# exploratory: U_0 against the closure of U_alpha ∩ U_{alpha^-1}


def explore_u0(seed: int = 0, cases: int = 20) -> dict:
    """Compare ``U_0`` with ``U ∩ U^-`` on representables; reported, never asserted."""
    agree = disagree = 0
    examples = []
    for k in range(cases):
        rng = random.Random(f"U0:{seed}:{k}")
        if k % 2 == 0:
            cfg = SHIFT[k // 2 % len(SHIFT)]
            fam = shift_family(cfg)
            inv = fam.inverse()
            x = random_shift_element(fam, rng)
            both = core.membership(fam, x, Target.U).yes and core.membership(inv, x, Target.U).yes
            # the closure of a set cut out by coordinate constraints is cut out by the same constraints
            u0 = core.membership(fam, x, Target.U0).yes
        else:
            cfg = MATRIX[k // 2 % len(MATRIX)]
            fam = random_matrix_family(rng, MATRIX_CONFIGS[cfg])
            x = _random_parabolic(fam, rng) if rng.random() < 0.5 else fam.identity()
            both = membership_predicates(fam, x, Target.U).yes and membership_predicates(fam.inverse(), x, Target.U).yes
            u0 = membership_predicates(fam, x, Target.U0).yes
        if both == u0:
            agree += 1
        else:
            disagree += 1
            examples.append({"config": cfg, "case": k})
    return {
        "question": "U_0 = closure of (U_alpha ∩ U_alpha^-1)",
        "cases": cases,
        "agree": agree,
        "disagree": disagree,
        "examples": examples[:3],
        "status": "consistent on samples" if not disagree else "counterexample candidates found",
    }


@dataclass
class SuiteReport:
    seed: int
    cases: int
    results: list
    exploratory: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "seed": self.seed,
            "cases_per_check": self.cases,
            "passed": self.passed,
            "checks": [r.to_json() for r in self.results],
            "traceability": {c.id: c.claim for c in CHECKS.values()},
            "exploratory": self.exploratory,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def run_suite(seed: int = 0, cases: int = DEFAULT_CASES, ids=None) -> SuiteReport:
    ids = list(ids) if ids else list(CHECKS)
    results = [run_check(i, None, seed, cases) for i in ids]
    return SuiteReport(seed, cases, results, explore_u0(seed))
