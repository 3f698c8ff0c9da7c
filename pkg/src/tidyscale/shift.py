"""Restricted products ``G = ∏_{i∈Z} F|O`` with the shift automorphism.

``G`` consists of sequences ``(x_i)`` in a finite group ``F`` with ``x_i ∈ O``
for all but finitely many ``i``; ``O^Z`` is compact open.  The automorphism
is ``alpha = σ^n`` with ``(σ^n x)_i = x_{i-n}``.

Elements are represented by their finitely supported members, which are dense
in ``G``.  Subgroups are coordinate-wise products; besides the compact open
ones we need the infinite intersections ``V_±``, so a ``ProductSubgroup``
carries an explicit window plus a periodic pattern on each side of it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import Certificate, GroupFamily, MembershipVerdict, Target, Verdict
from .errors import ValidationError
from .finite_groups import FiniteGroup

Sub = frozenset  # subgroup of F as a set of element indices


# --------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class ShiftElement:
    """Finitely supported sequence; ``items`` holds the non-identity coordinates."""

    items: tuple[tuple[int, int], ...] = ()

    @classmethod
    def make(cls, F: FiniteGroup, coords: Mapping[int, int]) -> ShiftElement:
        for a in coords.values():
            if not 0 <= a < F.order:
                raise ValidationError(f"element index {a} out of range for {F.name}")
        return cls(tuple(sorted((i, a) for i, a in coords.items() if a != F.identity)))

    def get(self, i: int, e: int) -> int:
        for j, a in self.items:
            if j == i:
                return a
        return e

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    @property
    def support(self) -> list[int]:
        return [i for i, _ in self.items]


def shift_apply(x: ShiftElement, n: int) -> ShiftElement:
    """``(σ^n x)_i = x_{i-n}``: the support moves by ``+n``."""
    return ShiftElement(tuple((i + n, a) for i, a in x.items))


def _mul(F: FiniteGroup, x: ShiftElement, y: ShiftElement) -> ShiftElement:
    dx, dy = x.as_dict(), y.as_dict()
    e = F.identity
    return ShiftElement.make(F, {i: F.mul(dx.get(i, e), dy.get(i, e)) for i in set(dx) | set(dy)})


def _inv(F: FiniteGroup, x: ShiftElement) -> ShiftElement:
    return ShiftElement(tuple((i, F.inv(a)) for i, a in x.items))


# --------------------------------------------------------------------------
# product subgroups


def _min_period(pattern: tuple) -> tuple:
    n = len(pattern)
    for d in range(1, n + 1):
        if n % d == 0 and all(pattern[i] == pattern[i % d] for i in range(n)):
            return pattern[:d]
    return pattern


@dataclass(frozen=True, eq=False)
class ProductSubgroup:
    """``∏_i V_i`` described by a window and two periodic tails.

    ``V_i = window[i - lo]`` for ``lo <= i < lo + len(window)``;
    ``V_i = left[(i - lo) % len(left)]`` for ``i < lo``;
    ``V_i = right[(i - hi) % len(right)]`` for ``i >= hi``.
    """

    lo: int
    window: tuple[Sub, ...]
    left: tuple[Sub, ...]
    right: tuple[Sub, ...]

    @property
    def hi(self) -> int:
        return self.lo + len(self.window)

    def at(self, i: int) -> Sub:
        if i < self.lo:
            return self.left[(i - self.lo) % len(self.left)]
        if i >= self.hi:
            return self.right[(i - self.hi) % len(self.right)]
        return self.window[i - self.lo]

    @property
    def period(self) -> int:
        return math.lcm(len(self.left), len(self.right))

    def span(self, *others: ProductSubgroup) -> range:
        """Coordinates beyond which all the given descriptions are periodic.

        Two descriptions agree everywhere iff they agree on this range.
        """
        return joint_span(self, *others)

    def canonical(self) -> ProductSubgroup:
        left, right = _min_period(self.left), _min_period(self.right)
        lo, win = self.lo, list(self.window)
        while win and win[-1] == right[-1]:
            win.pop()
            right = (right[-1],) + right[:-1]
        while win and win[0] == left[0]:
            win.pop(0)
            lo += 1
            left = left[1:] + left[:1]
        return ProductSubgroup(lo, tuple(win), left, right)

    def __eq__(self, other):
        if not isinstance(other, ProductSubgroup):
            return NotImplemented
        return all(self.at(i) == other.at(i) for i in self.span(other))

    def __hash__(self):
        c = self.canonical()
        return hash((c.left, c.right, len(c.window)))

    def is_compact_open(self, O: Sub) -> bool:
        c = self.canonical()
        return c.left == (O,) and c.right == (O,)



def joint_span(*subs: ProductSubgroup) -> range:
    lo = min(s.lo for s in subs)
    hi = max(s.hi for s in subs)
    per = math.lcm(*(s.period for s in subs))
    return range(lo - per, hi + per)


def build_product(f, lo: int, hi: int, per: int) -> ProductSubgroup:
    """Product subgroup with ``V_i = f(i)``, given that f has period ``per`` off ``[lo, hi)``."""
    window = tuple(f(i) for i in range(lo, hi))
    # position lo - per + k has (i - lo) % per == k
    left = tuple(f(lo - per + k) for k in range(per))
    right = tuple(f(hi + k) for k in range(per))
    return ProductSubgroup(lo, window, left, right).canonical()


def psub_index(F: FiniteGroup, A: ProductSubgroup, B: ProductSubgroup) -> int:
    """``|A : B|`` for ``B <= A``, the product of ``|A_i|/|B_i|``."""
    idx = 1
    lo, hi = min(A.lo, B.lo), max(A.hi, B.hi)
    for i in joint_span(A, B):
        a, b = A.at(i), B.at(i)
        if not b <= a:
            raise ValidationError(f"B is not contained in A at coordinate {i}")
        if a != b:
            if i < lo or i >= hi:
                raise ValidationError("index is infinite: the subgroups differ on a periodic tail")
            idx *= len(a) // len(b)
    return idx


# --------------------------------------------------------------------------
# family


class ShiftFamily(GroupFamily):
    """``alpha = σ^n`` on the restricted product of ``F`` over ``O``."""

    name = "shift"
    supports_full_algorithm = True
    t1_implies_t2 = False

    def __init__(self, F: FiniteGroup, O: Iterable[int], n: int = 1):
        if n == 0:
            raise ValidationError("the shift exponent n must be nonzero")
        self.F = F
        self.O = F.subgroup(O)
        self.n = n

    def __repr__(self):
        return f"ShiftFamily({self.F.name}, |O|={len(self.O)}, n={self.n})"

    def parameters(self) -> dict:
        return {"family": self.name, "F": self.F.name, "O": self.label_set(self.O), "n": self.n}

    def inverse(self) -> ShiftFamily:
        return ShiftFamily(self.F, self.O, -self.n)

    def power(self, k: int) -> ShiftFamily:
        return ShiftFamily(self.F, self.O, self.n * k)

    # ---- elements
    def identity(self) -> ShiftElement:
        return ShiftElement()

    def element(self, coords: Mapping[int, int]) -> ShiftElement:
        return ShiftElement.make(self.F, coords)

    def mul(self, a, b):
        return _mul(self.F, a, b)

    def inv(self, a):
        return _inv(self.F, a)

    def apply(self, x, k: int = 1):
        return shift_apply(x, self.n * k)

    # ---- subgroups
    def all_O(self) -> ProductSubgroup:
        return ProductSubgroup(0, (), (self.O,), (self.O,))

    def subgroup(self, constraints: Mapping[int, Iterable[int]]) -> ProductSubgroup:
        """Compact open subgroup with the given constraints and ``O`` elsewhere."""
        if not constraints:
            return self.all_O()
        lo, hi = min(constraints), max(constraints) + 1
        win = []
        for i in range(lo, hi):
            win.append(self.F.subgroup(constraints[i]) if i in constraints else self.O)
        return ProductSubgroup(lo, tuple(win), (self.O,), (self.O,)).canonical()

    def image(self, V: ProductSubgroup, k: int = 1) -> ProductSubgroup:
        return ProductSubgroup(V.lo + self.n * k, V.window, V.left, V.right)

    def intersect(self, A, B):
        return build_product(
            lambda i: A.at(i) & B.at(i), min(A.lo, B.lo), max(A.hi, B.hi), math.lcm(A.period, B.period)
        )

    def contains(self, A, B) -> bool:
        return all(B.at(i) <= A.at(i) for i in A.span(B))

    def member(self, x: ShiftElement, V: ProductSubgroup) -> bool:
        return all(a in V.at(i) for i, a in x.items)

    def index(self, A, B) -> int:
        return psub_index(self.F, A, B)

    # ---- derived subgroups

    def _orbit_intersection(self, V: ProductSubgroup, step: int) -> ProductSubgroup:
        """``W_i = ⋂_{m>=0} V_{i - m*step}``."""
        per = math.lcm(abs(step), len(V.left), len(V.right))
        lo, hi = V.lo - per, V.hi + per

        def beyond(j):
            return j < V.lo if step > 0 else j >= V.hi

        def f(i):
            # walk past the far end of the window, then one full tail period
            acc, j = V.at(i), i
            while not beyond(j):
                j -= step
                acc = acc & V.at(j)
            for _ in range(per):
                j -= step
                acc = acc & V.at(j)
            return acc

        return build_product(f, lo, hi, per)

    def plus(self, V):
        return self._orbit_intersection(V, self.n)

    def minus(self, V):
        return self._orbit_intersection(V, -self.n)

    def in_vminusminus(self, x: ShiftElement, V: ProductSubgroup) -> bool:
        """``x ∈ V_{--}``, i.e. ``alpha^m(x) ∈ V_-`` for some ``m >= 0``.

        The condition is monotone in ``m``, so it suffices to test one ``m``
        large enough to push the support of ``x`` into the periodic tail.
        """
        if not x.items:
            return True
        vm = self.minus(V)
        reach = max(abs(i) for i in x.support) + abs(vm.lo) + abs(vm.hi) + 2 * vm.period
        m = reach // abs(self.n) + vm.period + 1
        return self.member(self.apply(x, m), vm)

    def in_vplusplus(self, x: ShiftElement, V: ProductSubgroup) -> bool:
        return self.inverse().in_vminusminus(x, V)

    def vminusminus_closed(self, V) -> bool:
        return self.minus(V) == self.all_O()

    def vplusplus_closed(self, V) -> bool:
        return self.plus(V) == self.all_O()

    def derived_parts(self, V) -> dict:
        vp, vm = self.plus(V), self.minus(V)
        return {
            "V_plus": vp,
            "V_minus": vm,
            "V_zero": self.intersect(vp, vm),
            "V_minusminus_closed": self.vminusminus_closed(V),
            "V_plusplus_closed": self.vplusplus_closed(V),
        }

    def check_t1(self, V) -> Certificate:
        """(T1) holds iff ``(V_+)_i (V_-)_i = V_i`` at every coordinate."""
        vp, vm = self.plus(V), self.minus(V)
        for i in joint_span(V, vp, vm):
            prod = self.F.product_set(vp.at(i), vm.at(i))
            if prod != V.at(i):
                missing = sorted(self.F.label(a) for a in V.at(i) - prod)
                return Certificate(False, "t1", {"coordinate": i, "not_factored": missing})
        return Certificate(True, "t1", {"rule": "coordinate-wise factorization V_i = (V_+)_i (V_-)_i"})

    def check_t2(self, V) -> Certificate:
        a, b = self.vplusplus_closed(V), self.vminusminus_closed(V)
        return Certificate(
            a and b,
            "t2",
            {"V_plusplus_closed": a, "V_minusminus_closed": b, "rule": "closed iff V_+ (resp. V_-) is all of O^Z"},
        )

    # ---- steps 2 and 3
    #
    # L is the closure of {x : alpha^i(x) ∈ O' for almost all i}.  For a
    # product subgroup O' satisfying (T1) we have O' <= O^Z and O'_i = O for
    # |i| large.  The set ⋂_{|i|>=N} σ^{-i}(O') is again a product subgroup,
    # and at each coordinate j it is the intersection of O'_{j+i} over |i| >= N;
    # since O'_k = O once |k| is large, this equals O at every j with the
    # exception of finitely many coordinates, and the exceptional set moves off
    # to infinity as N grows.  The union over N is therefore the set of
    # finitely supported elements with coordinates in O together with their
    # limits, whose closure is O^Z.  Hence L = O^Z.

    def L_for(self, Oprime: ProductSubgroup) -> ProductSubgroup:
        return self.all_O()

    def in_L_defining_set(self, x: ShiftElement, Oprime: ProductSubgroup, horizon: int = 64) -> bool:
        """Finite check of "alpha^i(x) ∈ O' for almost all i" on a representable x.

        Membership fails only for finitely many ``i`` when it holds at both ends
        of a horizon that pushes the support beyond the window of ``O'``.
        """
        far = horizon + abs(Oprime.lo) + abs(Oprime.hi) + max((abs(i) for i in x.support), default=0)
        ends = [far, far + 1, -far, -far - 1]
        return all(self.member(shift_apply(x, k * abs(self.n)), Oprime) for k in ends)

    def steps23(self, Oprime: ProductSubgroup):
        t1 = self.check_t1(Oprime)
        if not t1.ok:
            raise ValidationError(f"steps 2-3 need a subgroup satisfying (T1); failed at {t1.evidence}")
        L = self.L_for(Oprime)
        F = self.F

        def ostar(i):
            Oi = Oprime.at(i)
            OiO = F.product_set(Oi, self.O)
            return frozenset(h for h in Oi if all(F.conj(o, h) in OiO for o in self.O))

        def odouble(i):
            return F.product_set(ostar(i), L.at(i))

        Ostar = build_product(ostar, Oprime.lo, Oprime.hi, Oprime.period)
        O2 = build_product(odouble, Oprime.lo, Oprime.hi, Oprime.period)
        for i in joint_span(O2, Ostar):
            F.subgroup(O2.at(i))
        return L, Ostar, O2

    # ---- filtration and scales

    def level(self, k: int) -> ProductSubgroup:
        """Level 0 is ``O^Z``; level k >= 1 is trivial on ``[-(k-1), k-1]``."""
        if k <= 0:
            return self.all_O()
        return self.subgroup({i: self.F.trivial() for i in range(-(k - 1), k)})

    def filtration_levels(self, count: int):
        return range(0, count + 1)

    def closed_form_scale(self) -> int:
        return 1

    # ---- membership

    def in_O(self, x: ShiftElement) -> tuple[bool, int | None]:
        for i, a in x.items:
            if a not in self.O:
                return False, i
        return True, None

    def membership_closed_form(self, x: ShiftElement, target: Target) -> MembershipVerdict:
        return membership_closed_form(self, x, target)

    # ---- presentation

    def label_set(self, s: Iterable[int]) -> list[str]:
        return sorted(self.F.label(a) for a in s)

    def describe(self, V: ProductSubgroup):
        c = V.canonical()
        return {
            "window_start": c.lo,
            "window": [self.label_set(s) for s in c.window],
            "left_tail": [self.label_set(s) for s in c.left],
            "right_tail": [self.label_set(s) for s in c.right],
        }

    def describe_element(self, x: ShiftElement):
        return {str(i): self.F.label(a) for i, a in x.items}


def membership_closed_form(fam: ShiftFamily, x: ShiftElement, target) -> MembershipVerdict:
    """All of U, P, M and U0 reduce to "every coordinate of x lies in O".

    Under σ^{kn} the support of x runs off to infinity.  The sets
    ``{e}`` on a window times ``O`` elsewhere form a neighbourhood base of the
    identity, so σ^{kn}(x) converges to e iff every coordinate of x is in O.
    A compact subset of G lies in a product of finite sets that equal O off a
    finite window; the orbit of x visits infinitely many coordinates with the
    same values, so it is bounded iff x ∈ O^Z.  Both directions of the shift
    behave alike, which settles M, and U0 = O^Z.
    """
    target = Target.parse(target)
    ok, bad = fam.in_O(x)
    if ok:
        return MembershipVerdict(Verdict.YES, 0, None, "all coordinates in O")
    # escape witness: the iterate moves the offending value to a coordinate
    # where every subgroup of the filtration is contained in O
    k = 1
    moved = bad + fam.n * k
    return MembershipVerdict(
        Verdict.NO,
        k,
        {"iterate": k, "coordinate": moved, "value": fam.F.label(x.as_dict()[bad]), "outside": "O"},
        f"coordinate {bad} is outside O, and every iterate keeps that value outside O",
    )


# --------------------------------------------------------------------------
# quotients


@dataclass(frozen=True)
class QuotientSpec:
    F: FiniteGroup
    O: frozenset
    K: frozenset
    Fbar: FiniteGroup
    proj: tuple[int, ...]
    Obar: frozenset

    @classmethod
    def make(cls, F: FiniteGroup, O: Iterable[int], K: Iterable[int]) -> QuotientSpec:
        O, K = F.subgroup(O), F.subgroup(K)
        if not F.is_normal(K):
            raise ValidationError("K must be normal in F")
        if not K <= O:
            raise ValidationError("K must be contained in O")
        Fbar, proj = F.quotient(K)
        Obar = frozenset(proj[o] for o in O)
        return cls(F, O, K, Fbar, proj, Obar)

    def family(self, n: int = 1) -> tuple[ShiftFamily, ShiftFamily]:
        return ShiftFamily(self.F, self.O, n), ShiftFamily(self.Fbar, self.Obar, n)


def quotient_push(x: ShiftElement, Q: QuotientSpec) -> ShiftElement:
    return ShiftElement.make(Q.Fbar, {i: Q.proj[a] for i, a in x.items})


def correcting_element(x: ShiftElement, Q: QuotientSpec) -> ShiftElement | None:
    """Search ``h`` with coordinates in ``K`` such that ``x h`` passes the U predicate.

    Only the coordinates in the support of ``x`` can matter; the search is the
    finite product of ``K`` over them.
    """
    F = Q.F
    supp = x.support
    d = x.as_dict()
    for choice in itertools.product(sorted(Q.K), repeat=len(supp)):
        if all(F.mul(d[i], h) in Q.O for i, h in zip(supp, choice)):
            return ShiftElement.make(F, dict(zip(supp, choice)))
    return None
