"""Finite groups given by multiplication tables.

Elements are the integers ``0..order-1``.  Tables are validated on
construction, so every ``FiniteGroup`` in circulation is a genuine group.

Text table format::

    # comments start with '#'
    order 4
    labels e a b c
    e a b c
    a e c b
    b c e a
    c b a e

Row ``i`` lists the labels of ``labels[i] * labels[j]`` for each ``j``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ValidationError


@dataclass(frozen=True)
class FiniteGroup:
    name: str
    table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]
    identity: int = field(init=False)
    inverses: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        n = len(self.table)
        if n == 0:
            raise ValidationError("empty group table")
        if len(self.labels) != n or len(set(self.labels)) != n:
            raise ValidationError("labels must be distinct and match the order")
        for row in self.table:
            if len(row) != n or sorted(row) != list(range(n)):
                raise ValidationError("every table row must be a permutation of the elements")
        for col in range(n):
            if sorted(r[col] for r in self.table) != list(range(n)):
                raise ValidationError("every table column must be a permutation of the elements")
        ids = [e for e in range(n) if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n))]
        if len(ids) != 1:
            raise ValidationError("table has no two-sided identity")
        e = ids[0]
        t = self.table
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise ValidationError(f"table is not associative at ({a},{b},{c})")
        inv = tuple(next(y for y in range(n) if t[x][y] == e) for x in range(n))
        object.__setattr__(self, "identity", e)
        object.__setattr__(self, "inverses", inv)

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def conj(self, g: int, h: int) -> int:
        """g h g^-1"""
        return self.table[self.table[g][h]][self.inverses[g]]

    def elements(self) -> range:
        return range(self.order)

    def label(self, a: int) -> str:
        return self.labels[a]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"{self.name} has no element labelled {label!r}") from None

    # ---- subgroups

    def subgroup(self, elems: Iterable[int]) -> frozenset[int]:
        """Validate ``elems`` as a subgroup and return it as a frozenset."""
        s = frozenset(elems)
        if any(not (0 <= x < self.order) for x in s):
            raise ValidationError("subgroup element out of range")
        if self.identity not in s:
            raise ValidationError("subgroup must contain the identity")
        for a in s:
            if self.inverses[a] not in s:
                raise ValidationError("set is not closed under inverses")
            for b in s:
                if self.table[a][b] not in s:
                    raise ValidationError(
                        f"set {{{', '.join(sorted(self.labels[x] for x in s))}}} is not closed under multiplication"
                    )
        return s

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        s = {self.identity}
        frontier = list(gens)
        while frontier:
            g = frontier.pop()
            if g in s:
                continue
            s.add(g)
            frontier.extend(self.table[g][h] for h in list(s))
            frontier.extend(self.table[h][g] for h in list(s))
        return frozenset(s)

    def trivial(self) -> frozenset[int]:
        return frozenset({self.identity})

    def whole(self) -> frozenset[int]:
        return frozenset(range(self.order))

    def product_set(self, a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
        b = list(b)
        return frozenset(self.table[x][y] for x in a for y in b)

    def is_normal(self, k: Iterable[int]) -> bool:
        k = frozenset(k)
        return all(self.conj(g, h) in k for g in range(self.order) for h in k)

    def all_subgroups(self) -> list[frozenset[int]]:
        """All subgroups, found by closing every subset of generators of size <= 2."""
        found = {self.trivial()}
        for a in range(self.order):
            for b in range(a, self.order):
                found.add(self.generated([a, b]))
        # groups here are tiny; two generators suffice for S3, C4, D4, A4, but
        # close under joins to be safe
        changed = True
        while changed:
            changed = False
            for h1, h2 in itertools.combinations(list(found), 2):
                j = self.generated(h1 | h2)
                if j not in found:
                    found.add(j)
                    changed = True
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def subgroups_of(self, ambient: Iterable[int]) -> list[frozenset[int]]:
        ambient = frozenset(ambient)
        return [h for h in self.all_subgroups() if h <= ambient]

    def quotient(self, k: Iterable[int]) -> tuple[FiniteGroup, tuple[int, ...]]:
        """Return ``(F/K, projection)`` where ``projection[x]`` is the class of x."""
        k = self.subgroup(k)
        if not self.is_normal(k):
            raise ValidationError("quotient by a non-normal subgroup")
        cosets: list[frozenset[int]] = []
        proj = [-1] * self.order
        # identity coset first so the quotient identity is element 0
        for g in [self.identity] + [x for x in range(self.order) if x != self.identity]:
            if proj[g] >= 0:
                continue
            c = frozenset(self.table[g][h] for h in k)
            for x in c:
                proj[x] = len(cosets)
            cosets.append(c)
        reps = [min(c, key=lambda x: (x != self.identity, x)) for c in cosets]
        table = tuple(tuple(proj[self.table[a][b]] for b in reps) for a in reps)
        labels = tuple(f"{self.labels[r]}K" if len(k) > 1 else self.labels[r] for r in reps)
        return FiniteGroup(f"{self.name}/K", table, labels), tuple(proj)


# --------------------------------------------------------------------------
# constructors


def from_permutations(name: str, perms: Sequence[tuple[int, ...]], labels: Sequence[str]) -> FiniteGroup:
    index = {p: i for i, p in enumerate(perms)}
    # (a*b)(x) = a(b(x))
    table = tuple(tuple(index[tuple(a[b[x]] for x in range(len(a)))] for b in perms) for a in perms)
    return FiniteGroup(name, table, tuple(labels))


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValidationError("cyclic group order must be positive")
    labels = ["e"] + ["c" if k == 1 else f"c{k}" for k in range(1, n)]
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return FiniteGroup(f"C{n}", table, tuple(labels))


def _cycle_label(perm: tuple[int, ...]) -> str:
    seen = set()
    parts = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = perm[x]
        parts.append("(" + "".join(str(c + 1) for c in cyc) + ")")
    return "".join(parts) or "e"


def _sign(perm: tuple[int, ...]) -> int:
    s = 1
    for i, j in itertools.combinations(range(len(perm)), 2):
        if perm[i] > perm[j]:
            s = -s
    return s


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= 5:
        raise ValidationError("symmetric groups are supported for 1 <= n <= 5")
    perms = sorted(itertools.permutations(range(n)), key=lambda p: (p != tuple(range(n)), p))
    return from_permutations(f"S{n}", perms, [_cycle_label(p) for p in perms])


def alternating(n: int) -> FiniteGroup:
    if not 1 <= n <= 5:
        raise ValidationError("alternating groups are supported for 1 <= n <= 5")
    perms = sorted(
        (p for p in itertools.permutations(range(n)) if _sign(p) == 1),
        key=lambda p: (p != tuple(range(n)), p),
    )
    return from_permutations(f"A{n}", perms, [_cycle_label(p) for p in perms])


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; elements r^k and s r^k."""
    if n < 2:
        raise ValidationError("dihedral groups need n >= 2")
    elems = [(f, k) for f in (0, 1) for k in range(n)]

    def mul(a, b):
        (f1, k1), (f2, k2) = a, b
        # s r^k s = r^-k
        return ((f1 + f2) % 2, ((-k1 if f2 else k1) + k2) % n)

    idx = {x: i for i, x in enumerate(elems)}
    table = tuple(tuple(idx[mul(a, b)] for b in elems) for a in elems)

    def lab(f, k):
        r = "" if k == 0 else ("r" if k == 1 else f"r{k}")
        if f:
            return "s" + r
        return r or "e"

    return FiniteGroup(f"D{n}", table, tuple(lab(*x) for x in elems))


_NAME_RE = re.compile(r"^(S|A|C|D)_?(\d+)$")


def group_by_name(name: str) -> FiniteGroup:
    """``S3``, ``A4``, ``C4``/``C_4``, ``D4`` (dihedral of order 8)."""
    m = _NAME_RE.match(name.strip())
    if not m:
        raise ValidationError(f"unknown group name {name!r}")
    kind, n = m.group(1), int(m.group(2))
    return {"S": symmetric, "A": alternating, "C": cyclic, "D": dihedral}[kind](n)


def parse_table(text: str, name: str = "F") -> FiniteGroup:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2 or not lines[0].startswith("order") or not lines[1].startswith("labels"):
        raise ValidationError("table must start with 'order N' and 'labels ...' lines")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ValidationError("malformed 'order' line") from None
    labels = lines[1].split()[1:]
    if len(labels) != n:
        raise ValidationError(f"expected {n} labels, got {len(labels)}")
    rows = lines[2:]
    if len(rows) != n:
        raise ValidationError(f"expected {n} table rows, got {len(rows)}")
    pos = {lab: i for i, lab in enumerate(labels)}
    table = []
    for row in rows:
        toks = row.split()
        if len(toks) != n or any(t not in pos for t in toks):
            raise ValidationError(f"malformed table row: {row!r}")
        table.append(tuple(pos[t] for t in toks))
    return FiniteGroup(name, tuple(table), tuple(labels))


def named_subgroup(group: FiniteGroup, spec: str) -> frozenset[int]:
    """Resolve a subgroup description.

    Accepts ``trivial``, ``all``, ``center``, a group name (``A3``, ``C2``) that
    names the unique subgroup of that isomorphism size when it is normal and
    unique, or a brace list of labels such as ``{e,(123),(132)}``.
    """
    s = spec.strip()
    if s in ("trivial", "e", "1"):
        return group.trivial()
    if s in ("all", "F"):
        return group.whole()
    if s == "center":
        return frozenset(z for z in group.elements() if all(group.mul(z, g) == group.mul(g, z) for g in group.elements()))
    if s.startswith("{") and s.endswith("}"):
        labs = [t.strip() for t in s[1:-1].split(",") if t.strip()]
        return group.subgroup(group.index_of(t) for t in labs)
    m = _NAME_RE.match(s)
    if m:
        target = group_by_name(s)
        cands = [h for h in group.all_subgroups() if len(h) == target.order and _isomorphic(group, h, target)]
        normal = [h for h in cands if group.is_normal(h)]
        pick = normal if len(normal) == 1 else cands
        if len(pick) == 1:
            return pick[0]
        raise ValidationError(f"{s} does not name a unique subgroup of {group.name}; list its elements instead")
    raise ValidationError(f"cannot parse subgroup {spec!r}")


def _isomorphic(group: FiniteGroup, h: frozenset[int], target: FiniteGroup) -> bool:
    # adequate for the tiny groups named on the command line: compare
    # sorted element orders and abelianness
    def orders(mul, elems, e):
        out = []
        for x in elems:
            k, y = 1, x
            while y != e:
                y = mul(y, x)
                k += 1
            out.append(k)
        return sorted(out)

    def abelian(mul, elems):
        return all(mul(a, b) == mul(b, a) for a in elems for b in elems)

    return orders(group.mul, h, group.identity) == orders(target.mul, target.elements(), target.identity) and abelian(
        group.mul, h
    ) == abelian(target.mul, target.elements())
