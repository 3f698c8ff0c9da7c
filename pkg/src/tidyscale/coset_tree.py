"""The tree of left ``V_-``-cosets in ``V_{--} ⋊ <alpha>``.

A vertex is a coset ``y alpha^m V_-`` with ``y ∈ V_{--}``; we store it as the
pair ``(m, y)`` and identify two pairs when the levels agree and
``y^{-1} y' ∈ alpha^m(V_-)``.  There is an edge ``(y, m) -> (w, m+1)`` iff
``w ∈ y alpha^m(V_-)``.  Each vertex then has ``|V_- : alpha(V_-)|`` out-edges
and exactly one in-edge, and the vertices ``V^(n) = (e, n)`` form a line ``P``
which ``alpha`` translates by one step.

Families plug in through small adapters that supply a canonical key for each
coset, so vertex equality is exact.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

from . import arith, core
from .errors import BudgetExceeded, ValidationError
from .finite_groups import FiniteGroup
from .matrix import MatrixFamily, ValuationShape, coset_key, coset_reps_vminus, random_element_of_shape
from .shift import ShiftElement, ShiftFamily

DEFAULT_VERTEX_BUDGET = 100_000
BUDGET_ENV = "TIDYSCALE_VERTEX_BUDGET"
SCHEMA = "tidyscale.coset-tree/1"


def vertex_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_VERTEX_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(f"{BUDGET_ENV} must be positive")
    return value


# --------------------------------------------------------------------------
# adapters


class MatrixCosets:
    """Cosets for conjugation by a diagonalizable matrix, in eigen-coordinates."""

    name = "matrix"

    def __init__(self, fam: MatrixFamily, V: ValuationShape | None = None):
        V = fam.level(1) if V is None else V
        if not core.is_tidy(fam, V).ok:
            raise ValidationError("V is not tidy")
        self.fam = fam
        self.V = V
        vm = fam.minus(V)
        self.s_inv = fam.index(fam.image(vm, -1), vm)
        self._ratio = tuple(tuple(fam.g.D[i] / fam.g.D[j] for j in range(fam.n)) for i in range(fam.n))

    def parameters(self) -> dict:
        return {**self.fam.parameters(), "V": self.V.to_json()}

    def identity(self):
        return arith.identity(self.fam.n)

    def mul(self, a, b):
        return arith.matmul(a, b)

    def inv(self, a):
        return arith.inverse(a)

    def apply(self, y, k: int):
        n = self.fam.n
        return tuple(tuple(y[i][j] * self._ratio[i][j] ** k for j in range(n)) for i in range(n))

    def key(self, y, m: int) -> tuple:
        return coset_key(self.fam, self.V, y, m)

    def in_level_subgroup(self, y, m: int) -> bool:
        """``y ∈ alpha^m(V_-)``"""
        return self.fam.member_eigen(y, self.fam.image(self.fam.minus(self.V), m))

    def in_vminusminus(self, y) -> bool:
        return self.fam.member_eigen(y, self.fam.minusminus(self.V))

    def reps(self, depth: int = 1, limit: int = DEFAULT_VERTEX_BUDGET) -> list:
        return coset_reps_vminus(self.fam, self.V, depth, limit)

    def sample(self, rng: random.Random, where: str = "minusminus", m: int = 0):
        fam = self.fam
        if where == "minusminus":
            S = fam.minusminus(self.V)
        elif where == "minus":
            S = fam.image(fam.minus(self.V), m)
        else:
            raise ValidationError(f"unknown sampling region {where!r}")
        return random_element_of_shape(fam, S, rng)

    def describe(self, y):
        return arith.format_matrix(y)


class ShiftCosets:
    """Cosets for the shift; the only tidy subgroup is ``O^Z`` and ``s(σ^{-1}) = 1``."""

    name = "shift"

    def __init__(self, fam: ShiftFamily, V=None):
        V = fam.all_O() if V is None else V
        if not core.is_tidy(fam, V).ok:
            raise ValidationError("V is not tidy")
        self.fam = fam
        self.V = V
        vm = fam.minus(V)
        self.s_inv = fam.index(fam.image(vm, -1), vm)
        self._vm = vm

    def parameters(self) -> dict:
        return {**self.fam.parameters(), "V": self.fam.describe(self.V)}

    def identity(self):
        return ShiftElement()

    def mul(self, a, b):
        return self.fam.mul(a, b)

    def inv(self, a):
        return self.fam.inv(a)

    def apply(self, y, k: int):
        return self.fam.apply(y, k)

    def key(self, y, m: int) -> tuple:
        if not self.in_vminusminus(y):
            raise ValidationError("element is not in V_--")
        # V_- = O^Z is alpha-stable and contains V_--, so there is one coset per level
        return ()

    def in_level_subgroup(self, y, m: int) -> bool:
        return self.fam.member(y, self.fam.image(self._vm, m))

    def in_vminusminus(self, y) -> bool:
        return self.fam.in_vminusminus(y, self.V)

    def reps(self, depth: int = 1, limit: int = DEFAULT_VERTEX_BUDGET) -> list:
        return [self.identity()]

    def sample(self, rng: random.Random, where: str = "minusminus", m: int = 0):
        O = sorted(self.fam.O)
        coords = {i: rng.choice(O) for i in rng.sample(range(-6, 7), rng.randint(0, 4))}
        return self.fam.element(coords)

    def describe(self, y):
        return self.fam.describe_element(y)


class InertProduct:
    """``K × G`` with ``alpha`` acting trivially on a finite group ``K``.

    ``K`` lies in every ``alpha^m(V_-)``, so it fixes every vertex: the kernel
    of the action contains the compact normal subgroup ``K``.
    """

    def __init__(self, K: FiniteGroup, base):
        self.K = K
        self.base = base
        self.name = f"{K.name}x{base.name}"
        self.s_inv = base.s_inv

    def parameters(self) -> dict:
        return {**self.base.parameters(), "inert_factor": self.K.name}

    def identity(self):
        return (self.K.identity, self.base.identity())

    def mul(self, a, b):
        return (self.K.mul(a[0], b[0]), self.base.mul(a[1], b[1]))

    def inv(self, a):
        return (self.K.inv(a[0]), self.base.inv(a[1]))

    def apply(self, y, k: int):
        return (y[0], self.base.apply(y[1], k))

    def key(self, y, m: int) -> tuple:
        return self.base.key(y[1], m)

    def in_level_subgroup(self, y, m: int) -> bool:
        return self.base.in_level_subgroup(y[1], m)

    def in_vminusminus(self, y) -> bool:
        return self.base.in_vminusminus(y[1])

    def reps(self, depth: int = 1, limit: int = DEFAULT_VERTEX_BUDGET) -> list:
        return [(self.K.identity, r) for r in self.base.reps(depth, limit)]

    def sample(self, rng: random.Random, where: str = "minusminus", m: int = 0):
        return (rng.randrange(self.K.order), self.base.sample(rng, where, m))

    def describe(self, y):
        return {"K": self.K.label(y[0]), "base": self.base.describe(y[1])}


# --------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class CosetVertex:
    level: int
    key: tuple
    rep: Any

    @property
    def id(self) -> tuple:
        return (self.level, self.key)


@dataclass(frozen=True)
class CosetTreeBall:
    """Finite piece of the coset tree.

    It holds the stretch ``V^(m0) .. V^(m1)`` of ``P`` together with every
    descendant of ``V^(m0)`` down to ``depth`` generations.  ``expanded``
    lists the vertices whose children were all added.
    """

    adapter: Any
    m0: int
    m1: int
    depth: int
    vertices: dict = field(default_factory=dict)
    edges: frozenset = frozenset()
    path: tuple = ()
    expanded: frozenset = frozenset()

    @property
    def s_inv(self) -> int:
        return self.adapter.s_inv

    @property
    def ends(self) -> dict:
        if not self.path:
            return {}
        return {"-inf": self.path[0], "+inf": self.path[-1]}

    def with_edges(self, edges) -> CosetTreeBall:
        return replace(self, edges=frozenset(edges))

    def __contains__(self, vid) -> bool:
        return vid in self.vertices

    def out_edges(self) -> dict:
        out = {v: [] for v in self.vertices}
        for a, b in sorted(self.edges):
            out.setdefault(a, []).append(b)
        return out

    def in_edges(self) -> dict:
        inc = {v: [] for v in self.vertices}
        for a, b in sorted(self.edges):
            inc.setdefault(b, []).append(a)
        return inc


def _estimate(s: int, depth: int, m0: int, m1: int) -> int:
    tree = sum(s**k for k in range(depth + 1))
    return tree + max(0, m1 - m0 - depth)


def build_ball(adapter, m0: int = 0, m1: int | None = None, depth: int = 1, budget: int | None = None) -> CosetTreeBall:
    """Spine ``V^(m0..m1)`` plus all descendants of ``V^(m0)`` for ``depth`` generations.

    ``m1`` defaults to ``m0 + depth``; ``m1 < m0`` gives the empty ball.
    """
    if depth < 0:
        raise ValidationError("depth must be non-negative")
    m1 = m0 + depth if m1 is None else m1
    if m1 < m0:
        return CosetTreeBall(adapter, m0, m1, depth)
    budget = vertex_budget() if budget is None else budget
    est = _estimate(adapter.s_inv, depth, m0, m1)
    if est > budget:
        raise BudgetExceeded(f"ball would have {est} vertices, over the budget of {budget}")
    e = adapter.identity()
    vertices: dict = {}
    edges = set()
    expanded = set()

    def add(y, m):
        v = CosetVertex(m, adapter.key(y, m), y)
        vertices.setdefault(v.id, v)
        return vertices[v.id]

    path = tuple(add(e, m).id for m in range(m0, m1 + 1))
    reps = adapter.reps(1)
    frontier = [vertices[path[0]]]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            step = [adapter.apply(r, v.level) for r in reps]
            for r in step:
                c = add(adapter.mul(v.rep, r), v.level + 1)
                edges.add((v.id, c.id))
                nxt.append(c)
            expanded.add(v.id)
        # a repeated child would collapse two cosets; keep it visible to the verifier
        frontier = list({c.id: c for c in nxt}.values())
    for a, b in zip(path, path[1:]):
        edges.add((a, b))
    return CosetTreeBall(adapter, m0, m1, depth, vertices, frozenset(edges), path, frozenset(expanded))


# --------------------------------------------------------------------------
# verification


@dataclass
class StructureReport:
    ok: bool
    violations: list
    vertices: int
    edges: int
    interior: int
    s_inv: int

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": core.jsonable(self.violations),
            "vertices": self.vertices,
            "edges": self.edges,
            "interior_vertices": self.interior,
            "s_inverse": str(self.s_inv),
        }


def _vname(vid) -> str:
    m, key = vid
    return f"{m}:{','.join(str(x) for x in key)}"


def verify_local_structure(ball: CosetTreeBall) -> StructureReport:
    """Check degrees, the edge rule, acyclicity and connection to ``P``."""
    ad = ball.adapter
    s = ad.s_inv
    bad = []

    def flag(kind, vid, detail=""):
        bad.append({"kind": kind, "vertex": _vname(vid), "detail": detail})

    for vid, v in sorted(ball.vertices.items()):
        if ad.key(v.rep, v.level) != v.key or vid != v.id:
            flag("key", vid, "stored key does not match the canonical form")
    for a, b in sorted(ball.edges):
        if a not in ball.vertices or b not in ball.vertices:
            flag("dangling-edge", a if a not in ball.vertices else b, f"edge {_vname(a)} -> {_vname(b)}")
            continue
        va, vb = ball.vertices[a], ball.vertices[b]
        if vb.level != va.level + 1:
            flag("edge-level", a, f"edge to level {vb.level}")
        elif not ad.in_level_subgroup(ad.mul(ad.inv(va.rep), vb.rep), va.level):
            flag("edge-rule", a, f"{_vname(b)} is not below {_vname(a)}")
    out, inc = ball.out_edges(), ball.in_edges()
    root = ball.path[0] if ball.path else None
    interior = 0
    for vid in sorted(ball.vertices):
        indeg, outdeg = len(inc.get(vid, [])), len(out.get(vid, []))
        if indeg > 1:
            flag("in-degree", vid, f"{indeg} in-edges")
        if indeg == 0 and vid != root:
            flag("in-degree", vid, "no in-edge")
        if vid in ball.expanded:
            if outdeg != s:
                flag("out-degree", vid, f"{outdeg} out-edges, expected {s}")
            if indeg == 1:
                interior += 1
                if indeg + outdeg != s + 1:
                    flag("degree", vid, f"total degree {indeg + outdeg}, expected {s + 1}")
        elif outdeg > s:
            flag("out-degree", vid, f"{outdeg} out-edges, more than {s}")
    # acyclicity by repeated removal of sources
    indeg = {v: len(inc.get(v, [])) for v in ball.vertices}
    queue = sorted(v for v, d in indeg.items() if d == 0)
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in out.get(v, []):
            if w in indeg:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
    if seen != len(ball.vertices):
        flag("cycle", min(v for v, d in indeg.items() if d > 0), "directed cycle")
    # every vertex reaches P by following in-edges
    on_path = set(ball.path)
    for vid in sorted(ball.vertices):
        cur, steps = vid, 0
        while cur not in on_path and inc.get(cur) and steps <= len(ball.vertices):
            cur = inc[cur][0]
            steps += 1
        if cur not in on_path:
            flag("disconnected", vid, "no path to P")
    for a, b in zip(ball.path, ball.path[1:]):
        if (a, b) not in ball.edges:
            flag("path", a, f"missing path edge to {_vname(b)}")
    return StructureReport(not bad, bad, len(ball.vertices), len(ball.edges), interior, s)


# --------------------------------------------------------------------------
# the action


@dataclass(frozen=True)
class AlphaPower:
    k: int = 1


@dataclass(frozen=True)
class ActResult:
    vertex: tuple
    in_ball: bool
    rep: Any = None


def act(ball: CosetTreeBall, w, vid) -> ActResult:
    """Image of a vertex under ``w ∈ V_{--}`` or ``AlphaPower(k)``."""
    ad = ball.adapter
    v = ball.vertices[vid]
    if isinstance(w, AlphaPower):
        m = v.level + w.k
        y = ad.apply(v.rep, w.k)
    else:
        if not ad.in_vminusminus(w):
            raise ValidationError("the acting element is not in V_--")
        m = v.level
        y = ad.mul(w, v.rep)
    img = (m, ad.key(y, m))
    return ActResult(img, img in ball.vertices, y)


def adjacent(ball: CosetTreeBall, a: ActResult, b: ActResult) -> bool:
    """Edge rule on images, decided exactly whether or not they lie in the ball."""
    ad = ball.adapter
    if a.in_ball and b.in_ball:
        return (a.vertex, b.vertex) in ball.edges
    return b.vertex[0] == a.vertex[0] + 1 and ad.in_level_subgroup(ad.mul(ad.inv(a.rep), b.rep), a.vertex[0])


def check_action(ball: CosetTreeBall, samples: int = 100, seed: int = 0) -> list:
    """Sampled (element, edge) pairs whose images are not adjacent; empty when all is well."""
    rng = random.Random(f"action:{seed}")
    edges = sorted(ball.edges)
    if not edges:
        return []
    failures = []
    for case in range(samples):
        a, b = edges[rng.randrange(len(edges))]
        choice = case % 3
        if choice == 0:
            w = AlphaPower(rng.choice([-2, -1, 1, 2]))
        elif choice == 1:
            w = ball.adapter.sample(rng, "minus", ball.m0)
        else:
            w = ball.adapter.sample(rng, "minusminus")
        ia, ib = act(ball, w, a), act(ball, w, b)
        if not adjacent(ball, ia, ib):
            failures.append({"case": case, "edge": [_vname(a), _vname(b)]})
    return failures


def check_translation(ball: CosetTreeBall) -> bool:
    """``alpha`` maps ``V^(n)`` to ``V^(n+1)`` along the visible part of ``P``."""
    return all(act(ball, AlphaPower(1), a).vertex == b for a, b in zip(ball.path, ball.path[1:]))


def check_stabilizer(ball: CosetTreeBall, samples: int = 50, seed: int = 0) -> list:
    """``w`` fixes ``V^(m0)`` iff ``w ∈ alpha^{m0}(V_-)``, on sampled ``w ∈ V_{--}``."""
    rng = random.Random(f"stab:{seed}")
    ad = ball.adapter
    base = ball.path[0]
    failures = []
    for case in range(samples):
        w = ad.sample(rng, "minus" if case % 2 else "minusminus", ball.m0)
        fixes = act(ball, w, base).vertex == base
        if fixes != ad.in_level_subgroup(w, ball.m0):
            failures.append({"case": case, "element": ad.describe(w), "fixes": fixes})
    return failures


def end_images_distinct(adapter, depth: int) -> dict:
    """Images of the ray ``V^(0), ..., V^(depth)`` under coset representatives of ``V_-/alpha^depth(V_-)``.

    The representatives lie in the contraction group and fix ``V^(0)``;
    distinct ones must send the ray to distinct rays, which is visible at
    level ``depth``.
    """
    reps = adapter.reps(depth)
    e = adapter.identity()
    base = (0, adapter.key(e, 0))
    fixed = all((0, adapter.key(u, 0)) == base for u in reps)
    tips = {adapter.key(u, depth) for u in reps}
    return {"representatives": len(reps), "distinct_tips": len(tips), "fix_base": fixed, "ok": fixed and len(tips) == len(reps)}


def kernel_acts_trivially(ball: CosetTreeBall) -> bool:
    """For an ``InertProduct`` ball: every ``k ∈ K`` fixes every vertex."""
    ad = ball.adapter
    if not isinstance(ad, InertProduct):
        raise ValidationError("kernel check needs an inert product")
    base_e = ad.base.identity()
    return all(act(ball, (k, base_e), vid).vertex == vid for k in range(ad.K.order) for vid in ball.vertices)


# --------------------------------------------------------------------------
# export


def _node_ids(ball: CosetTreeBall) -> dict:
    ids = {}
    by_level: dict = {}
    for vid in sorted(ball.vertices):
        by_level.setdefault(vid[0], []).append(vid)
    for m in sorted(by_level):
        for i, vid in enumerate(by_level[m]):
            ids[vid] = f"m{m}_{i}".replace("-", "n")
    return ids


def _key_label(key: tuple) -> str:
    return "(" + ",".join(str(Fraction(x)) if isinstance(x, (int, Fraction)) else str(x) for x in key) + ")"


def export_dot(ball: CosetTreeBall) -> str:
    lines = ["digraph coset_tree {"]
    if ball.vertices:
        ids = _node_ids(ball)
        on_path = set(ball.path)
        lines.append("  rankdir=TB;")
        lines.append(f'  label="s(alpha^-1)={ball.s_inv}";')
        levels: dict = {}
        for vid in sorted(ball.vertices):
            levels.setdefault(vid[0], []).append(ids[vid])
            lab = f"V^({vid[0]})" if vid in on_path else f"{vid[0]}:{_key_label(vid[1])}"
            style = ", color=red, penwidth=2" if vid in on_path else ""
            lines.append(f'  {ids[vid]} [label="{lab}"{style}];')
        for m in sorted(levels):
            lines.append("  { rank=same; " + " ".join(levels[m]) + "; }")
        path_edges = set(zip(ball.path, ball.path[1:]))
        for a, b in sorted(ball.edges):
            style = " [color=red, penwidth=2]" if (a, b) in path_edges else ""
            lines.append(f"  {ids[a]} -> {ids[b]}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ball_to_json(ball: CosetTreeBall) -> dict:
    ids = _node_ids(ball)
    on_path = set(ball.path)
    return {
        "schema": SCHEMA,
        "parameters": core.jsonable(ball.adapter.parameters()),
        "s_inverse": str(ball.s_inv),
        "levels": [ball.m0, ball.m1],
        "depth": ball.depth,
        "vertices": [
            {
                "id": ids[vid],
                "level": vid[0],
                "key": [str(x) for x in vid[1]],
                "on_path": vid in on_path,
                "representative": core.jsonable(ball.adapter.describe(ball.vertices[vid].rep)),
            }
            for vid in sorted(ball.vertices)
        ],
        "edges": [[ids[a], ids[b]] for a, b in sorted(ball.edges)],
        "path": [ids[v] for v in ball.path],
        "ends": {k: ids[v] for k, v in ball.ends.items()},
        "counts": {"vertices": len(ball.vertices), "edges": len(ball.edges), "path": len(ball.path)},
    }


def export(ball: CosetTreeBall, fmt: str = "dot") -> str:
    fmt = fmt.lower()
    if fmt == "dot":
        return export_dot(ball)
    if fmt == "json":
        return json.dumps(ball_to_json(ball), indent=2, sort_keys=True) + "\n"
    raise ValidationError(f"unknown export format {fmt!r}; expected dot or json")


def degree_summary(ball: CosetTreeBall) -> dict:
    """Out-degree histogram of the expanded vertices (used by reports)."""
    out = ball.out_edges()
    hist: dict = {}
    for vid in ball.expanded:
        d = len(out.get(vid, []))
        hist[d] = hist.get(d, 0) + 1
    return dict(sorted(hist.items()))

