"""Conjugation automorphisms of GL_n(Q_p), represented over Q.

``alpha(x) = g x g^{-1}``.  When ``g = C D C^{-1}`` with ``D`` diagonal and
``det C`` a p-adic unit we pass to eigen-coordinates ``y = C^{-1} x C``; there
``alpha`` multiplies entry ``(i, j)`` by ``D_ii / D_jj`` and so adds
``d_ij = v_i - v_j`` to its valuation, where ``v`` is the valuation vector of
``D``.  Everything below (shapes, predicates, coset forms) lives in these
coordinates.

Compact open subgroups are *valuation shapes*: ``{I + N : v(N_ij) >= S_ij}``
for an integer matrix ``S`` with ``S_ii >= 1`` and ``S_ij <= S_il + S_lj``.
Entries ``+inf`` force ``N_ij = 0``, entries ``-inf`` leave ``N_ij`` free; these
describe the non-open subgroups ``V_±`` and ``V_{±±}``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import arith
from .arith import INF, Matrix, as_matrix, identity, inverse, matmul, valuation
from .core import Certificate, GroupFamily, Method, MembershipVerdict, ScaleResult, Target, Verdict
from .errors import BudgetExceeded, ConsistencyError, SingularMatrixError, UnsupportedError, ValidationError

DEFAULT_COSET_LIMIT = 100_000


# --------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class MatrixElement:
    entries: Matrix
    p: int
    valuations: tuple[int, ...] | None = None
    C: Matrix | None = None
    C_inv: Matrix | None = None
    D: tuple[Fraction, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def has_diagonal_form(self) -> bool:
        return self.valuations is not None

    def inverse(self) -> MatrixElement:
        ent = inverse(self.entries)
        if not self.has_diagonal_form:
            return MatrixElement(ent, self.p)
        return MatrixElement(
            ent, self.p, tuple(-v for v in self.valuations), self.C, self.C_inv, tuple(1 / d for d in self.D)
        )

    def power(self, k: int) -> MatrixElement:
        ent = arith.matpow(self.entries, k)
        if not self.has_diagonal_form:
            return MatrixElement(ent, self.p)
        return MatrixElement(ent, self.p, tuple(k * v for v in self.valuations), self.C, self.C_inv, tuple(d**k for d in self.D))


def make_element(entries, p: int, conjugator=None, special: bool = False) -> MatrixElement:
    """Validate ``g`` and attach its diagonal form.

    A diagonal ``g`` gets ``C = I`` automatically.  Otherwise ``conjugator``
    must be supplied with ``C^{-1} g C`` diagonal and ``det C`` a p-unit.
    """
    arith._check_prime(p)
    g = as_matrix(entries)
    if not arith.is_square(g) or not g:
        raise ValidationError("g must be a non-empty square matrix")
    det = arith.determinant(g)
    if det == 0:
        raise SingularMatrixError("g is singular")
    if special and det != 1:
        raise ValidationError(f"g has determinant {det}, not 1")
    n = len(g)
    if conjugator is None:
        if any(g[i][j] != 0 for i in range(n) for j in range(n) if i != j):
            return MatrixElement(g, p)
        C = identity(n)
    else:
        C = as_matrix(conjugator)
        if len(C) != n or not arith.is_square(C):
            raise ValidationError("conjugator has the wrong size")
    dc = arith.determinant(C)
    if dc == 0:
        raise SingularMatrixError("conjugator is singular")
    if valuation(dc, p) != 0:
        raise ValidationError("conjugator determinant must be a p-adic unit")
    Ci = inverse(C)
    Dm = matmul(matmul(Ci, g), C)
    if any(Dm[i][j] != 0 for i in range(n) for j in range(n) if i != j):
        raise ValidationError("C^-1 g C is not diagonal")
    D = tuple(Dm[i][i] for i in range(n))
    return MatrixElement(g, p, tuple(valuation(d, p) for d in D), C, Ci, D)


def diag_element(values: Sequence, p: int, special: bool = False) -> MatrixElement:
    return make_element(arith.diagonal(values), p, special=special)


# --------------------------------------------------------------------------
# adjoint representation and the Newton-polygon scale


def adjoint_matrix(g) -> Matrix:
    """Matrix of ``X -> g X g^{-1}`` on the basis ``E_kl`` (index ``k*n + l``)."""
    g = as_matrix(g.entries if isinstance(g, MatrixElement) else g)
    gi = inverse(g)
    n = len(g)
    cols = []
    for k in range(n):
        for l in range(n):
            cols.append([g[i][k] * gi[l][j] for i in range(n) for j in range(n)])
    return tuple(tuple(cols[c][r] for c in range(n * n)) for r in range(n * n))


def scale_via_newton(g, p: int) -> ScaleResult:
    """Product of ``|λ|_p`` over eigenvalues of ``Ad(g)`` with ``|λ|_p > 1``.

    Read off the Newton polygon of the characteristic polynomial: a segment of
    slope ``s > 0`` and length ``m`` carries ``m`` eigenvalues of absolute
    value ``p^s``.
    """
    ent = g.entries if isinstance(g, MatrixElement) else as_matrix(g)
    poly = arith.char_poly(adjoint_matrix(ent))
    total = Fraction(0)
    for slope, mult in arith.newton_polygon(poly, p).segments:
        if slope > 0:
            total += slope * mult
    if total.denominator != 1:
        raise ConsistencyError(f"non-integral scale exponent {total}")
    return ScaleResult(p ** int(total), Method.CLOSED_FORM)


def scale_via_lattice(g: MatrixElement) -> int:
    """``[A L : A L ∩ L]`` for ``A = Ad(D)`` (or ``Ad(g)`` without a diagonal form)."""
    if g.has_diagonal_form:
        return arith.lattice_coindex(adjoint_matrix(arith.diagonal(g.D)), g.p)
    return arith.lattice_coindex(adjoint_matrix(g.entries), g.p)


def is_integral_unit(m: Matrix, p: int) -> bool:
    """``m ∈ GL_n(Z_p)``."""
    if any(valuation(x, p) < 0 for row in m for x in row if x != 0):
        return False
    return valuation(arith.determinant(m), p) == 0


# --------------------------------------------------------------------------
# valuation shapes


def _fmt(x):
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return int(x)


@dataclass(frozen=True)
class ValuationShape:
    """``{I + N : v(N_ij) >= S_ij}`` in eigen-coordinates."""

    S: tuple[tuple, ...]
    level: int | None = None

    @property
    def n(self) -> int:
        return len(self.S)

    @classmethod
    def congruence(cls, n: int, k: int) -> ValuationShape:
        if k < 1:
            raise ValidationError("congruence level must be at least 1")
        return cls(tuple(tuple(k for _ in range(n)) for _ in range(n)), k)

    def validate(self) -> ValuationShape:
        n = self.n
        for i in range(n):
            if self.S[i][i] < 1:
                raise ValidationError(f"diagonal shape entry ({i},{i}) must be >= 1")
        for i, j, l in itertools.product(range(n), repeat=3):
            a, b = self.S[i][l], self.S[l][j]
            if a == -INF or b == -INF:
                continue
            if self.S[i][j] > a + b:
                raise ValidationError(f"shape is not closed under multiplication at ({i},{j}) via {l}")
        return self

    def is_open(self) -> bool:
        return all(abs(x) != INF for row in self.S for x in row)

    def to_json(self):
        return [[_fmt(x) for x in row] for row in self.S]


def shape_contains_matrix(S: ValuationShape, N: Matrix, p: int) -> tuple[bool, tuple | None]:
    for i, row in enumerate(N):
        for j, x in enumerate(row):
            s = S.S[i][j]
            if x == 0 or s == -INF:
                continue
            if s == INF or valuation(x, p) < s:
                return False, (i, j)
    return True, None


# --------------------------------------------------------------------------
# family


class MatrixFamily(GroupFamily):
    """``alpha = conjugation by g`` for ``g`` with a rational diagonal form."""

    name = "matrix"
    supports_full_algorithm = False
    t1_implies_t2 = True

    def __init__(self, g: MatrixElement, t1_samples: int = 12):
        if not g.has_diagonal_form:
            raise UnsupportedError("the matrix family needs g with a rational diagonal form")
        self.g = g
        self.p = g.p
        self.n = g.n
        self.v = g.valuations
        self.d = tuple(tuple(self.v[i] - self.v[j] for j in range(self.n)) for i in range(self.n))
        self.t1_samples = t1_samples
        self._gi = inverse(g.entries)

    def __repr__(self):
        return f"MatrixFamily(p={self.p}, v={self.v})"

    def parameters(self) -> dict:
        return {
            "family": self.name,
            "p": self.p,
            "g": arith.format_matrix(self.g.entries),
            "valuations": list(self.v),
        }

    def inverse(self) -> MatrixFamily:
        return MatrixFamily(self.g.inverse(), self.t1_samples)

    def power(self, k: int) -> MatrixFamily:
        return MatrixFamily(self.g.power(k), self.t1_samples)

    # ---- coordinates
    def to_eigen(self, x: Matrix) -> Matrix:
        return matmul(matmul(self.g.C_inv, x), self.g.C)

    def from_eigen(self, y: Matrix) -> Matrix:
        return matmul(matmul(self.g.C, y), self.g.C_inv)

    # ---- elements
    def identity(self):
        return identity(self.n)

    def mul(self, a, b):
        return matmul(a, b)

    def inv(self, a):
        return inverse(a)

    def apply(self, x, k: int = 1):
        if k == 0:
            return x
        gk = arith.matpow(self.g.entries, k)
        return matmul(matmul(gk, x), inverse(gk))

    # ---- subgroups
    def level(self, k: int) -> ValuationShape:
        return ValuationShape.congruence(self.n, k)

    def shape(self, S) -> ValuationShape:
        return ValuationShape(tuple(tuple(x for x in row) for row in S)).validate()

    def image(self, V: ValuationShape, k: int = 1) -> ValuationShape:
        return ValuationShape(tuple(tuple(V.S[i][j] + k * self.d[i][j] for j in range(self.n)) for i in range(self.n)))

    def intersect(self, A, B):
        return ValuationShape(tuple(tuple(max(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A.S, B.S)))

    def contains(self, A, B) -> bool:
        return all(b >= a for ra, rb in zip(A.S, B.S) for a, b in zip(ra, rb))

    def member(self, x, V: ValuationShape) -> bool:
        return self.member_eigen(self.to_eigen(x), V)

    def member_eigen(self, y, V: ValuationShape) -> bool:
        if arith.determinant(y) == 0:
            return False
        return shape_contains_matrix(V, arith.matsub(y, identity(self.n)), self.p)[0]

    def index(self, A, B) -> int:
        if not self.contains(A, B):
            raise ValidationError("B is not contained in A")
        e = 0
        for ra, rb in zip(A.S, B.S):
            for a, b in zip(ra, rb):
                if a == b:
                    continue
                if abs(a) == INF or abs(b) == INF:
                    raise ValidationError("index is infinite")
                e += b - a
        return self.p ** int(e)

    def _mask(self, V, pred, value):
        return ValuationShape(
            tuple(tuple(value if pred(self.d[i][j]) else V.S[i][j] for j in range(self.n)) for i in range(self.n))
        )

    def plus(self, V):
        return self._mask(V, lambda d: d > 0, INF)

    def minus(self, V):
        return self._mask(V, lambda d: d < 0, INF)

    def zero(self, V):
        return self._mask(V, lambda d: d != 0, INF)

    def plusplus(self, V):
        return self._mask(self.plus(V), lambda d: d < 0, -INF)

    def minusminus(self, V):
        return self._mask(self.minus(V), lambda d: d > 0, -INF)

    # ---- (T1) and (T2)

    def block_order(self) -> list[int]:
        """Indices sorted by decreasing valuation (stable)."""
        return sorted(range(self.n), key=lambda i: -self.v[i])

    def block_lu(self, y: Matrix) -> tuple[Matrix, Matrix]:
        """``y = a b`` with ``a`` zero where ``v_i > v_j`` and ``b`` block unipotent, zero where ``v_i < v_j``.

        In the order of decreasing valuation, ``a`` is block lower triangular
        and ``b`` block upper unitriangular: an exact block LU factorization.
        """
        n, order = self.n, self.block_order()
        blocks = [list(grp) for _, grp in itertools.groupby(order, key=lambda i: self.v[i])]
        M = [[y[i][j] for j in range(n)] for i in range(n)]
        a = [[Fraction(0)] * n for _ in range(n)]
        b = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for k, blk in enumerate(blocks):
            later = [i for bl in blocks[k + 1 :] for i in bl]
            P = tuple(tuple(M[i][j] for j in blk) for i in blk)
            try:
                Pi = inverse(P)
            except SingularMatrixError:
                raise ValidationError("element does not admit a block LU factorization") from None
            for i in blk + later:
                for j in blk:
                    a[i][j] = M[i][j]
            # b_kj = P^{-1} M_kj for later column blocks
            for r_pos, r in enumerate(blk):
                for j in later:
                    b[r][j] = sum((Pi[r_pos][c_pos] * M[c][j] for c_pos, c in enumerate(blk)), Fraction(0))
            for i in later:
                for j in later:
                    M[i][j] -= sum((M[i][c] * b[c][j] for c in blk), Fraction(0))
        return tuple(map(tuple, a)), tuple(map(tuple, b))

    def sample_elements(self, V: ValuationShape, count: int, seed: str) -> list[Matrix]:
        """Generators ``I + p^{S_ij} E_ij`` plus seeded random elements of ``V``."""
        n, p = self.n, self.p
        out = []
        for i in range(n):
            for j in range(n):
                s = V.S[i][j]
                if abs(s) == INF:
                    continue
                m = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
                m[i][j] += Fraction(p) ** s
                out.append(tuple(map(tuple, m)))
        rng = random.Random(seed)
        for _ in range(count):
            m = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
            for i in range(n):
                for j in range(n):
                    s = V.S[i][j]
                    if s == INF:
                        continue
                    base = 0 if s == -INF else s
                    m[i][j] += Fraction(p) ** base * rng.randrange(-p * p, p * p + 1)
            if arith.determinant(tuple(map(tuple, m))) != 0:
                out.append(tuple(map(tuple, m)))
        # a few products
        for _ in range(min(count, len(out))):
            a, b = rng.choice(out), rng.choice(out)
            out.append(matmul(a, b))
        return out

    def check_t1(self, V: ValuationShape) -> Certificate:
        """Exact block LU factorizations of generators and sampled elements.

        ``V_+ V_- <= V`` always holds, so (T1) is the reverse inclusion; each
        sampled ``y ∈ V`` is factored as ``a b`` and both factors are checked
        against the shapes of ``V_+`` and ``V_-``.
        """
        V.validate()
        vp, vm = self.plus(V), self.minus(V)
        witnesses = 0
        for y in self.sample_elements(V, self.t1_samples, f"t1:{V.to_json()}:{self.v}"):
            if not self.member_eigen(y, V):
                raise ConsistencyError("sampled element is not in V")
            try:
                a, b = self.block_lu(y)
            except ValidationError:
                return Certificate(False, "t1", {"element": arith.format_matrix(y), "failure": "no block LU"})
            if matmul(a, b) != y:
                raise ConsistencyError("block LU does not multiply back")
            if not (self.member_eigen(a, vp) and self.member_eigen(b, vm)):
                return Certificate(False, "t1", {"element": arith.format_matrix(y), "failure": "factors leave V_+ / V_-"})
            witnesses += 1
        return Certificate(True, "t1", {"rule": "block LU factorization in eigen-coordinates", "witnesses": witnesses})

    def check_t2(self, V: ValuationShape) -> Certificate:
        # U_alpha is the closed group of block-unipotent matrices, so U_0 = {1}
        # and (T1) plus U_0 <= V certifies tidiness.
        return Certificate(True, "t2", {"rule": "contains U_0 = {1}; contraction group closed"})

    def closed_form_scale(self) -> int:
        e = sum(self.v[j] - self.v[i] for i in range(self.n) for j in range(self.n) if self.v[i] < self.v[j])
        return self.p**e

    # ---- membership

    def membership_closed_form(self, x, target: Target) -> MembershipVerdict:
        return membership_predicates(self, x, target)

    def describe(self, V):
        return V.to_json()

    def describe_element(self, x):
        return arith.format_matrix(x)


def membership_predicates(fam: MatrixFamily, x, target, horizon: int = 1) -> MembershipVerdict:
    """Exact U / P / M / U0 predicates in eigen-coordinates.

    ``alpha^k`` multiplies ``y_ij`` by ``(D_ii/D_jj)^k``, of valuation
    ``k (v_i - v_j)``.  The forward orbit converges to ``I`` iff every entry
    with ``v_i <= v_j`` already equals ``δ_ij``; it is bounded iff the entries
    with ``v_i < v_j`` vanish.
    """
    target = Target.parse(target)
    x = as_matrix(x)
    if arith.determinant(x) == 0:
        raise SingularMatrixError("x is singular")
    y = fam.to_eigen(x)
    n, v = fam.n, fam.v

    def bad_entry(pred):
        for i in range(n):
            for j in range(n):
                if pred(i, j) and y[i][j] != int(i == j):
                    return i, j
        return None

    if target is Target.U:
        bad = bad_entry(lambda i, j: v[i] <= v[j])
    elif target is Target.P:
        bad = bad_entry(lambda i, j: v[i] < v[j])
    elif target is Target.M:
        bad = bad_entry(lambda i, j: v[i] != v[j])
    else:
        bad = bad_entry(lambda i, j: True)
    if bad is None:
        return MembershipVerdict(Verdict.YES, 0, None, "eigen-coordinate predicate")
    i, j = bad
    k = max(horizon, 1)
    d = v[i] - v[j]
    if target is Target.M and d > 0:
        # escapes under alpha^{-1}
        k = -k
    iterate_val = valuation(y[i][j] - int(i == j), fam.p) + k * d if y[i][j] != int(i == j) else None
    return MembershipVerdict(
        Verdict.NO,
        abs(k),
        {"entry": [i, j], "valuation_gap": d, "iterate": k, "entry_valuation_at_iterate": iterate_val},
        "entry stays away from the identity (d=0) or its valuation decreases without bound",
    )


def membership_general(g: MatrixElement, x, target, horizon: int = 16) -> MembershipVerdict:
    """Membership for ``g`` without a diagonal form: iterate and report ``Unknown``."""
    x = as_matrix(x)
    if x == identity(len(x)):
        return MembershipVerdict(Verdict.YES, 0, None, "identity")
    if g.has_diagonal_form:
        return membership_predicates(MatrixFamily(g), x, target)
    gk = arith.matpow(g.entries, horizon)
    last = matmul(matmul(gk, x), inverse(gk))
    return MembershipVerdict(Verdict.UNKNOWN, horizon, arith.format_matrix(last), "no diagonal form")


# --------------------------------------------------------------------------
# scale by indices, Levi factorization, coset representatives


def scale_via_index_oracle(g: MatrixElement, level: int = 1) -> ScaleResult:
    """Displacement index of the level-k congruence shape, checked against the lattice coindex."""
    if not g.has_diagonal_form:
        # the congruence subgroups are normalized by GL_n(Z_p), so for such g
        # the level-k subgroup is alpha-stable and the index is 1
        if is_integral_unit(g.entries, g.p) and is_integral_unit(inverse(g.entries), g.p):
            lat = scale_via_lattice(g)
            if lat != 1:
                raise ConsistencyError(f"lattice coindex {lat} for an integral unit")
            return ScaleResult(1, Method.INDEX_AT_TIDY, ((Method.LATTICE_COINDEX, lat),))
        raise UnsupportedError("index oracle needs a diagonal form or g in GL_n(Z_p)")
    fam = MatrixFamily(g)
    V = fam.level(level)
    aV = fam.image(V, 1)
    value = fam.index(aV, fam.intersect(V, aV))
    lat = scale_via_lattice(g)
    if lat != value:
        raise ConsistencyError(f"shape index {value} != lattice coindex {lat}")
    return ScaleResult(value, Method.INDEX_AT_TIDY, ((Method.LATTICE_COINDEX, lat),))


def matrix_scale(g: MatrixElement) -> ScaleResult:
    """Newton-polygon scale with every independent method as a cross-check."""
    res = scale_via_newton(g.entries, g.p)
    checks = []
    try:
        idx = scale_via_index_oracle(g)
        checks.append((Method.INDEX_AT_TIDY, idx.value))
    except UnsupportedError:
        pass
    checks.append((Method.LATTICE_COINDEX, scale_via_lattice(g)))
    for m, val in checks:
        if val != res.value and m is Method.INDEX_AT_TIDY:
            raise ConsistencyError(f"Newton polygon gives {res.value}, {m.value} gives {val}")
    return ScaleResult(res.value, res.method, tuple(checks))


def levi_factorization(fam: MatrixFamily, x) -> tuple[Matrix, Matrix]:
    """``x = m u`` with ``m ∈ M_alpha`` (block diagonal) and ``u ∈ U_alpha``."""
    x = as_matrix(x)
    if not membership_predicates(fam, x, Target.P).yes:
        raise ValidationError("x is not in the parabolic subgroup")
    y = fam.to_eigen(x)
    n, v = fam.n, fam.v
    m = tuple(tuple(y[i][j] if v[i] == v[j] else Fraction(0) for j in range(n)) for i in range(n))
    u = matmul(inverse(m), y)
    mx, ux = fam.from_eigen(m), fam.from_eigen(u)
    if matmul(mx, ux) != x:
        raise ConsistencyError("Levi factors do not multiply back")
    if not (membership_predicates(fam, mx, Target.M).yes and membership_predicates(fam, ux, Target.U).yes):
        raise ConsistencyError("Levi factors fail their predicates")
    return mx, ux


def coset_reps_vminus(fam: MatrixFamily, V: ValuationShape, depth: int = 1, limit: int = DEFAULT_COSET_LIMIT) -> list[Matrix]:
    """Representatives of ``V_- / alpha^depth(V_-)`` in eigen-coordinates.

    They are ``I + X`` with ``X`` supported on the entries with ``v_i > v_j``
    and ``X_ij`` running over the p-adic digit sums between valuations
    ``S_ij`` and ``S_ij + depth*(v_i - v_j)``.
    """
    if depth < 1:
        raise ValidationError("depth must be at least 1")
    n, p = fam.n, fam.p
    slots = [(i, j) for i in range(n) for j in range(n) if fam.d[i][j] > 0]
    total = p ** sum(depth * fam.d[i][j] for i, j in slots)
    if total > limit:
        raise BudgetExceeded(f"{total} coset representatives exceed the limit {limit}")
    choices = [arith.padic_digit_values(V.S[i][j], V.S[i][j] + depth * fam.d[i][j], p) for i, j in slots]
    reps = []
    for combo in itertools.product(*choices):
        m = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
        for (i, j), c in zip(slots, combo):
            m[i][j] = c
        reps.append(tuple(map(tuple, m)))
    return reps


def coset_key(fam: MatrixFamily, V: ValuationShape, y: Matrix, m: int) -> tuple:
    """Canonical form of the coset ``y alpha^m(V_-)`` for ``y ∈ V_{--}`` (eigen-coordinates).

    Strip the block-diagonal part (it lies in ``V_0``, hence in the coset's
    subgroup), then clear the strictly block-triangular entries column by
    column, nearest the diagonal first, replacing each by its canonical
    residue modulo ``p^{H_ij}`` where ``H`` is the shape of ``alpha^m(V_-)``.
    """
    n, p, v = fam.n, fam.p, fam.v
    if not fam.member_eigen(y, fam.minusminus(V)):
        raise ValidationError("element is not in V_--")
    H = fam.image(fam.minus(V), m).S
    bd = tuple(tuple(y[i][j] if v[i] == v[j] else Fraction(0) for j in range(n)) for i in range(n))
    nm = [list(r) for r in matmul(y, inverse(bd))]
    for j in range(n):
        rows = sorted((i for i in range(n) if v[i] > v[j]), key=lambda i: (v[i], i))
        for i in rows:
            t = nm[i][j] - arith.padic_reduce(nm[i][j], p, H[i][j])
            if t:
                for r in range(n):
                    nm[r][j] -= t * nm[r][i]
    return tuple(nm[i][j] for i in range(n) for j in range(n) if v[i] > v[j])


def random_element_of_shape(fam: MatrixFamily, S: ValuationShape, rng: random.Random, spread: int = 2) -> Matrix:
    """Seeded element of a shape (``-inf`` entries get valuation ``-spread``)."""
    n, p = fam.n, fam.p
    while True:
        m = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
        for i in range(n):
            for j in range(n):
                s = S.S[i][j]
                if s == INF:
                    continue
                base = -spread if s == -INF else s
                m[i][j] += Fraction(p) ** base * rng.randrange(0, p**2)
        mm = tuple(map(tuple, m))
        if arith.determinant(mm) != 0:
            return mm


def parse_grid(text: str) -> Matrix:
    """``"1,2;3,4"`` -> ``((1,2),(3,4))``."""
    rows = [r for r in text.strip().split(";") if r.strip()]
    return as_matrix([[c.strip() for c in r.split(",")] for r in rows])


def is_diagonal(m: Iterable[Iterable]) -> bool:
    m = as_matrix(m)
    return all(m[i][j] == 0 for i in range(len(m)) for j in range(len(m)) if i != j)


def valuation_gap_sum(v: Sequence[int]) -> int:
    return sum(abs(a - b) for a, b in itertools.combinations(v, 2))


__all__ = [
    "MatrixElement",
    "MatrixFamily",
    "ValuationShape",
    "adjoint_matrix",
    "coset_key",
    "coset_reps_vminus",
    "diag_element",
    "levi_factorization",
    "make_element",
    "matrix_scale",
    "membership_general",
    "membership_predicates",
    "scale_via_index_oracle",
    "scale_via_lattice",
    "scale_via_newton",
]
