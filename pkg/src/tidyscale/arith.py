"""Exact rational arithmetic with p-adic valuations.

Everything here works over ``fractions.Fraction``; nothing is ever rounded.
Matrices are tuples of row tuples so they can be hashed and shared freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import SingularMatrixError, ValidationError

INF = math.inf

Matrix = tuple[tuple[Fraction, ...], ...]


@lru_cache(maxsize=256)
def is_prime(p: int) -> bool:
    if not isinstance(p, int) or p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValidationError(f"{p!r} is not a prime")


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"num/den"`` strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse rational {x!r}") from exc
    raise ValidationError(f"unsupported rational value {x!r} (floats are rejected)")


def _int_valuation(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p: int):
    """Exponent of ``p`` in ``x``; ``math.inf`` for zero."""
    _check_prime(p)
    x = to_fraction(x)
    if x == 0:
        return INF
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def abs_p(x, p: int) -> Fraction:
    v = valuation(x, p)
    if v == INF:
        return Fraction(0)
    return Fraction(p) ** (-v)


def padic_reduce(x, p: int, n: int) -> Fraction:
    """Canonical representative of ``x`` modulo ``p**n`` in the localization at p.

    The result is ``p**v * m`` with ``v = valuation(x)`` and ``0 <= m < p**(n-v)``,
    or 0 when ``valuation(x) >= n``.  Congruent inputs give identical outputs.
    """
    x = to_fraction(x)
    if n == INF:
        return x
    v = valuation(x, p)
    if v >= n:
        return Fraction(0)
    unit = x / Fraction(p) ** v
    modulus = p ** (n - v)
    m = unit.numerator * pow(unit.denominator, -1, modulus) % modulus
    return Fraction(p) ** v * m


def padic_digit_values(lo: int, hi: int, p: int) -> list[Fraction]:
    """All sums ``sum(c_j p^j for lo <= j < hi)`` with digits in ``0..p-1``."""
    if hi <= lo:
        return [Fraction(0)]
    base = Fraction(p) ** lo
    return [base * m for m in range(p ** (hi - lo))]


# --------------------------------------------------------------------------
# matrices


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(tuple(to_fraction(e) for e in row) for row in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValidationError("ragged matrix")
    return m


def is_square(a: Sequence[Sequence]) -> bool:
    return all(len(r) == len(a) for r in a)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def diagonal(entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(
        tuple(to_fraction(entries[i]) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a)


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def determinant(a: Matrix) -> Fraction:
    if not is_square(a):
        raise ValidationError("determinant of a non-square matrix")
    m = [list(r) for r in as_matrix(a)]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def inverse(a: Matrix) -> Matrix:
    if not is_square(a):
        raise ValidationError("inverse of a non-square matrix")
    a = as_matrix(a)
    n = len(a)
    m = [list(a[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        pv = m[c][c]
        m[c] = [x / pv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def matpow(a: Matrix, k: int) -> Matrix:
    if k < 0:
        return matpow(inverse(a), -k)
    result = identity(len(a))
    base = as_matrix(a)
    while k:
        if k & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        k >>= 1
    return result


def format_matrix(a: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in a]


# --------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with rational coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        c = [to_fraction(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable) -> RationalPolynomial:
        poly = [Fraction(1)]
        for r in roots:
            r = to_fraction(r)
            nxt = [Fraction(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] += c
                nxt[i] -= r * c
            poly = nxt
        return cls(tuple(poly))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x) -> Fraction:
        x = to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: RationalPolynomial) -> RationalPolynomial:
        if self.is_zero() or other.is_zero():
            return RationalPolynomial(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(tuple(out))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ")


def char_poly(m) -> RationalPolynomial:
    """Characteristic polynomial det(xI - M) by the Faddeev-LeVerrier recursion.

    All divisions are by the integers 1..n, so the computation stays exact.
    """
    m = as_matrix(m)
    if not is_square(m):
        raise ValidationError("characteristic polynomial of a non-square matrix")
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    aux = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # aux <- M * aux + c_{n-k+1} I
        prod = [[sum((m[i][l] * aux[l][j] for l in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += coeffs[n - k + 1]
        aux = prod
        trace = sum((sum((m[i][l] * aux[l][i] for l in range(n)), Fraction(0)) for i in range(n)), Fraction(0))
        coeffs[n - k] = -trace / k
    return RationalPolynomial(tuple(coeffs))


# --------------------------------------------------------------------------
# Newton polygons


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of ``(i, v_p(a_i))``.

    ``segments`` holds ``(slope, horizontal length)`` pairs with strictly
    increasing slopes.  A segment of slope ``s`` accounts for that many roots
    of valuation ``-s``.
    """

    p: int
    vertices: tuple[tuple[int, int], ...]
    segments: tuple[tuple[Fraction, int], ...]

    def root_valuations(self) -> list[tuple[Fraction, int]]:
        return [(-s, m) for s, m in self.segments]


def newton_polygon(f, p: int) -> NewtonPolygon:
    _check_prime(p)
    if not isinstance(f, RationalPolynomial):
        f = RationalPolynomial(tuple(f))
    if f.is_zero():
        raise ValidationError("Newton polygon of the zero polynomial")
    pts = [(i, valuation(c, p)) for i, c in enumerate(f.coeffs) if c != 0]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] unless it lies strictly below the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = tuple(
        (Fraction(y2 - y1, x2 - x1), x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    )
    return NewtonPolygon(p, tuple(hull), segs)


# --------------------------------------------------------------------------
# elementary divisors


@dataclass(frozen=True)
class ElementaryDivisors:
    p: int
    valuations: tuple[int, ...]


def elementary_divisor_valuations(a, p: int) -> ElementaryDivisors:
    """Smith form valuations over the integers localized at ``p``.

    Each step pivots on an entry of least valuation (ties: lowest row, then
    lowest column) and clears its row and column with multipliers of
    non-negative valuation, i.e. unimodular operations.
    """
    _check_prime(p)
    m = [list(r) for r in as_matrix(a)]
    if not is_square(m):
        raise ValidationError("elementary divisors need a square matrix")
    n = len(m)
    if determinant(tuple(tuple(r) for r in m)) == 0:
        raise SingularMatrixError("elementary divisors of a singular matrix")
    vals = []
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                if m[i][j] != 0:
                    v = valuation(m[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        v, i, j = best
        m[k], m[i] = m[i], m[k]
        for row in m:
            row[k], row[j] = row[j], row[k]
        piv = m[k][k]
        for r in range(k + 1, n):
            if m[r][k]:
                f = m[r][k] / piv
                m[r] = [x - f * y for x, y in zip(m[r], m[k])]
        for c in range(k + 1, n):
            if m[k][c]:
                f = m[k][c] / piv
                for r in range(k, n):
                    m[r][c] -= f * m[r][k]
        vals.append(v)
    return ElementaryDivisors(p, tuple(sorted(vals)))


def lattice_coindex(a, p: int) -> int:
    """Index of ``AL ∩ L`` in ``AL`` for the standard lattice ``L``."""
    ed = elementary_divisor_valuations(a, p)
    return p ** sum(-e for e in ed.valuations if e < 0)
