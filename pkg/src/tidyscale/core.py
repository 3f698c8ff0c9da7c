"""Family-generic tidying engine.

A *family* bundles a concrete group ``G``, an automorphism ``alpha`` and a
representation of compact open subgroups.  The engine below only talks to the
``GroupFamily`` interface, so the same driver runs the tidying procedure,
computes scales and answers membership queries for every family.

Conventions used throughout:

* ``V_+ = ⋂_{n>=0} alpha^n(V)`` and ``V_- = ⋂_{n>=0} alpha^{-n}(V)``,
  ``V_0 = V_+ ∩ V_-``;
* ``V_{++} = ⋃ alpha^n(V_+)``, ``V_{--} = ⋃ alpha^{-n}(V_-)``;
* (T1) means ``V = V_+ V_-``; (T2) means ``V_{++}`` and ``V_{--}`` are closed;
* the scale is ``s(alpha) = |alpha(V_+) : V_+|`` for tidy ``V``, which is also
  the minimum of the displacement index ``|alpha(V) : V ∩ alpha(V)|``.
"""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import ConsistencyError, Step1CapExceeded, UnsupportedError, ValidationError

DEFAULT_STEP1_CAP = 64
DEFAULT_FILTRATION_LEVELS = 4


class Target(str, enum.Enum):
    U = "U"
    P = "P"
    M = "M"
    U0 = "U0"

    @classmethod
    def parse(cls, s) -> Target:
        if isinstance(s, Target):
            return s
        try:
            return cls(str(s).upper().replace("_", ""))
        except ValueError:
            raise ValidationError(f"unknown membership target {s!r}; expected U, P, M or U0") from None


class Verdict(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    INDEX_AT_TIDY = "index_at_tidy"
    MINIMIZED_OVER_FILTRATION = "minimized_over_filtration"
    # matrix family only: [AL : AL ∩ L] for the adjoint action on the standard lattice
    LATTICE_COINDEX = "lattice_coindex"


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: Verdict
    horizon: int
    witness: Any = None
    reason: str = ""

    def __bool__(self):
        raise TypeError("use .verdict; a MembershipVerdict is three-valued")

    @property
    def yes(self) -> bool:
        return self.verdict is Verdict.YES

    @property
    def no(self) -> bool:
        return self.verdict is Verdict.NO

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "horizon": str(self.horizon),
            "witness": _jsonable(self.witness),
            "reason": self.reason,
        }


@dataclass(frozen=True)
class Certificate:
    """Outcome of a (T1)/(T2)/tidiness check together with its evidence."""

    ok: bool
    kind: str
    evidence: Any = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "kind": self.kind, "evidence": _jsonable(self.evidence)}


@dataclass(frozen=True)
class ScaleResult:
    value: int
    method: Method
    cross_checks: tuple[tuple[Method, int], ...] = ()

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "method": self.method.value,
            "cross_checks": [{"method": m.value, "value": str(v)} for m, v in self.cross_checks],
        }


class GroupFamily(ABC):
    """A group, an automorphism ``alpha`` of it, and its compact open subgroups.

    Subclasses supply exact element arithmetic, subgroup algebra and the
    family-specific closed forms.  Subgroup objects may describe non-open
    subgroups too (``V_+``, ``V_-``), as long as ``index`` can compare them when
    the index is finite.
    """

    name = "abstract"
    supports_full_algorithm = False
    t1_implies_t2 = False
    metrizable = True

    # ---- elements
    @abstractmethod
    def identity(self): ...

    @abstractmethod
    def mul(self, a, b): ...

    @abstractmethod
    def inv(self, a): ...

    def eq(self, a, b) -> bool:
        return a == b

    @abstractmethod
    def apply(self, x, k: int = 1):
        """``alpha^k(x)``"""

    # ---- subgroups
    @abstractmethod
    def image(self, V, k: int = 1):
        """``alpha^k(V)``"""

    @abstractmethod
    def intersect(self, A, B): ...

    @abstractmethod
    def contains(self, A, B) -> bool:
        """``B <= A``"""

    def same(self, A, B) -> bool:
        return self.contains(A, B) and self.contains(B, A)

    @abstractmethod
    def member(self, x, V) -> bool: ...

    @abstractmethod
    def index(self, A, B) -> int:
        """``|A : B|`` for ``B <= A``; raises if not finite."""

    @abstractmethod
    def plus(self, V): ...

    @abstractmethod
    def minus(self, V): ...

    def zero(self, V):
        return self.intersect(self.plus(V), self.minus(V))

    @abstractmethod
    def check_t1(self, V) -> Certificate: ...

    @abstractmethod
    def check_t2(self, V) -> Certificate: ...

    def steps23(self, V):
        raise UnsupportedError(f"{self.name}: steps 2-3 of the tidying procedure are not available")

    @abstractmethod
    def level(self, k: int):
        """Canonical compact open subgroup of the shrinking filtration."""

    def filtration_levels(self, count: int) -> Iterable[int]:
        return range(1, count + 1)

    def closed_form_scale(self) -> int | None:
        return None

    def membership_closed_form(self, x, target: Target) -> MembershipVerdict | None:
        return None

    @abstractmethod
    def inverse(self) -> GroupFamily:
        """The same group with ``alpha^{-1}``."""

    def describe(self, V) -> Any:
        return repr(V)

    def describe_element(self, x) -> Any:
        return repr(x)

    def parameters(self) -> dict:
        return {"family": self.name}


# --------------------------------------------------------------------------
# engine


def displacement_index(fam: GroupFamily, V) -> int:
    """``|alpha(V) : V ∩ alpha(V)|``."""
    aV = fam.image(V, 1)
    return fam.index(aV, fam.intersect(V, aV))


def iterate_intersection(fam: GroupFamily, V, k: int):
    """``⋂_{i=0..k} alpha^i(V)``."""
    if k < 0:
        raise ValidationError("k must be non-negative")
    W = V
    for i in range(1, k + 1):
        W = fam.intersect(W, fam.image(V, i))
    return W


def tidying_step1(fam: GroupFamily, V, cap: int = DEFAULT_STEP1_CAP):
    """Smallest ``k <= cap`` such that ``⋂_{i<=k} alpha^i(V)`` satisfies (T1)."""
    if cap < 1:
        raise ValidationError("step-1 cap must be at least 1")
    W = V
    for k in range(cap + 1):
        if k:
            W = fam.intersect(W, fam.image(V, k))
        if fam.check_t1(W).ok:
            return W, k
    raise Step1CapExceeded(cap)


@dataclass
class TidyReport:
    family: str
    input: Any
    step1_k: int
    after_step1: Any
    v_plus: Any
    v_minus: Any
    v_zero: Any
    t1: Certificate
    t2: Certificate
    L: Any = None
    O_star: Any = None
    output: Any = None
    scale: int = 0
    scale_inverse: int = 0
    tidy: bool = False
    notes: list[str] = field(default_factory=list)

    def to_json(self, fam: GroupFamily) -> dict:
        d = lambda V: _jsonable(fam.describe(V))  # noqa: E731
        return {
            "schema": "tidyscale.tidy-report/1",
            "family": self.family,
            "parameters": _jsonable(fam.parameters()),
            "input": d(self.input),
            "step1_k": str(self.step1_k),
            "after_step1": d(self.after_step1),
            "V_plus": d(self.v_plus),
            "V_minus": d(self.v_minus),
            "V_zero": d(self.v_zero),
            "t1": self.t1.to_json(),
            "t2": self.t2.to_json(),
            "L": None if self.L is None else d(self.L),
            "O_star": None if self.O_star is None else d(self.O_star),
            "output": d(self.output),
            "scale": str(self.scale),
            "scale_inverse": str(self.scale_inverse),
            "tidy": self.tidy,
            "notes": list(self.notes),
        }


def tidy(fam: GroupFamily, V, cap: int = DEFAULT_STEP1_CAP) -> TidyReport:
    """Run the tidying procedure and certify the result."""
    W, k = tidying_step1(fam, V, cap)
    notes = []
    L = O_star = None
    if fam.t1_implies_t2:
        out = W
        notes.append("(T2) certified from (T1) and the closedness of the contraction group")
    elif fam.supports_full_algorithm:
        L, O_star, out = fam.steps23(W)
    else:
        raise UnsupportedError(f"{fam.name}: cannot complete the tidying procedure")
    t1 = fam.check_t1(out)
    t2 = fam.check_t2(out)
    if not (t1.ok and t2.ok):
        raise ConsistencyError(f"{fam.name}: tidying output failed certification (T1={t1.ok}, T2={t2.ok})")
    vp, vm = fam.plus(out), fam.minus(out)
    v0 = fam.intersect(vp, vm)
    s = fam.index(fam.image(vp, 1), vp)
    s_inv = fam.index(fam.image(vm, -1), vm)
    if not fam.same(fam.image(v0, 1), v0):
        raise ConsistencyError("V_0 is not alpha-stable")
    return TidyReport(
        family=fam.name,
        input=V,
        step1_k=k,
        after_step1=W,
        v_plus=vp,
        v_minus=vm,
        v_zero=v0,
        t1=t1,
        t2=t2,
        L=L,
        O_star=O_star,
        output=out,
        scale=s,
        scale_inverse=s_inv,
        tidy=True,
        notes=notes,
    )


def is_tidy(fam: GroupFamily, V) -> Certificate:
    """Direct tidiness test, without running the procedure."""
    t1 = fam.check_t1(V)
    if not t1.ok:
        return Certificate(False, "tidy", {"t1": t1.to_json()})
    t2 = fam.check_t2(V)
    return Certificate(t2.ok, "tidy", {"t1": t1.to_json(), "t2": t2.to_json()})


def _scale_methods(fam: GroupFamily, levels: int, cap: int) -> list[tuple[Method, int]]:
    results = []
    cf = fam.closed_form_scale()
    if cf is not None:
        results.append((Method.CLOSED_FORM, cf))
    try:
        base = fam.level(next(iter(fam.filtration_levels(levels))))
        results.append((Method.INDEX_AT_TIDY, tidy(fam, base, cap).scale))
    except UnsupportedError:
        pass
    try:
        mins = [displacement_index(fam, tidying_step1(fam, fam.level(k), cap)[0]) for k in fam.filtration_levels(levels)]
        results.append((Method.MINIMIZED_OVER_FILTRATION, min(mins)))
    except UnsupportedError:
        pass
    return results


def scale(fam: GroupFamily, levels: int = DEFAULT_FILTRATION_LEVELS, cap: int = DEFAULT_STEP1_CAP) -> ScaleResult:
    """Scale of ``alpha`` with every available independent method cross-checked."""
    results = _scale_methods(fam, levels, cap)
    if not results:
        raise UnsupportedError(f"{fam.name}: no scale method available")
    values = {v for _, v in results}
    if len(values) != 1:
        raise ConsistencyError(f"{fam.name}: scale methods disagree: {results}")
    method, value = results[0]
    return ScaleResult(value, method, tuple(results[1:]))


def scale_inverse(fam: GroupFamily, levels: int = DEFAULT_FILTRATION_LEVELS, cap: int = DEFAULT_STEP1_CAP) -> ScaleResult:
    return scale(fam.inverse(), levels, cap)


def modular_value(fam: GroupFamily, W, k: int = 1):
    """``Δ(alpha^k)`` on a closed alpha-stable subgroup via a compact open ``W`` of it.

    ``|alpha^k(W) : alpha^k(W) ∩ W| / |W : alpha^k(W) ∩ W|``.  The caller is
    responsible for ``W`` being compact open in the subgroup; independence of
    ``W`` is checked by the test-suite, not assumed here.
    """
    from fractions import Fraction

    aW = fam.image(W, k)
    inter = fam.intersect(aW, W)
    return Fraction(fam.index(aW, inter), fam.index(W, inter))


def membership(fam: GroupFamily, x, target, horizon: int = 16) -> MembershipVerdict:
    target = Target.parse(target)
    if horizon <= 0:
        raise ValidationError("horizon must be positive")
    v = fam.membership_closed_form(x, target)
    if v is not None:
        return v
    if fam.eq(x, fam.identity()):
        return MembershipVerdict(Verdict.YES, 0, None, "identity")
    last = x
    for _ in range(horizon):
        last = fam.apply(last, 1)
    return MembershipVerdict(Verdict.UNKNOWN, horizon, fam.describe_element(last), "no closed form for this element")


# --------------------------------------------------------------------------
# json helpers


def _jsonable(obj):
    from fractions import Fraction

    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return "inf" if obj == float("inf") else ("-inf" if obj == float("-inf") else repr(obj))
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in obj]
        return sorted(items, key=str) if isinstance(obj, (set, frozenset)) else items
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return repr(obj)


jsonable = _jsonable
