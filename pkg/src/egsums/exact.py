"""Exact rational substrate: series terms, closed-form tails, enclosures, rendering.

All real quantities are :class:`fractions.Fraction` values; nothing in this
package touches floating point on a certified path.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .errors import DomainError

ExactRational = Fraction

_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)")
_RATIO = re.compile(r"[+-]?\d+\s*/\s*\d+")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer, or a finite decimal such as ``"0.25"`` exactly."""
    s = str(text).strip()
    if _RATIO.fullmatch(s):
        p, q = s.split("/")
        if int(q) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(p), int(q))
    if _DECIMAL.fullmatch(s):
        return Fraction(s)
    raise ValueError(f"not an exact rational: {text!r}")


def format_rational(q: Fraction) -> str:
    """Lowest-terms ``"p/q"`` with ``q > 0`` (always carries the denominator)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> RationalInterval:
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: RationalInterval) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other):
        if isinstance(other, RationalInterval):
            return RationalInterval(self.lo + other.lo, self.hi + other.hi)
        return RationalInterval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RationalInterval):
            return RationalInterval(self.lo - other.hi, self.hi - other.lo)
        return RationalInterval(self.lo - other, self.hi - other)

    def __rsub__(self, other):
        return RationalInterval(other - self.hi, other - self.lo)

    def scale(self, factor) -> RationalInterval:
        if factor < 0:
            raise DomainError("negative scale factor")
        return RationalInterval(self.lo * factor, self.hi * factor)

    def to_json(self) -> list[str]:
        return [format_rational(self.lo), format_rational(self.hi)]

    @classmethod
    def from_json(cls, pair) -> RationalInterval:
        lo, hi = pair
        return cls(parse_rational(lo), parse_rational(hi))

    def __str__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


@dataclass(frozen=True)
class TermSpec:
    """The series term 1/((n+1)(n+2)...(n+f))."""

    n: int
    f: int

    def __post_init__(self):
        if self.n < 1 or self.f < 1:
            raise DomainError(f"term needs n >= 1 and f >= 1, got n={self.n}, f={self.f}")


def rising_product(n: int, f: int) -> int:
    """(n+1)(n+2)...(n+f) = (n+f)!/n!."""
    if n < 1 or f < 1:
        raise DomainError(f"rising_product needs n >= 1 and f >= 1, got n={n}, f={f}")
    return math.perm(n + f, f)


def term(spec: TermSpec | tuple[int, int]) -> Fraction:
    if not isinstance(spec, TermSpec):
        spec = TermSpec(*spec)
    return Fraction(1, rising_product(spec.n, spec.f))


def tail_closed_form(N: int, m: int) -> Fraction:
    """Sum over n >= m of 1/prod_{i=1}^{N+1}(n+i), which telescopes to 1/(N prod_{i=1}^{N}(m+i))."""
    if N < 1 or m < 1:
        raise DomainError(f"tail_closed_form needs N >= 1 and m >= 1, got N={N}, m={m}")
    return Fraction(1, N * rising_product(m, N))


def stage_element(j: int, k: int) -> int:
    """k-th element (1-based) of 2^(j-1) * (odd numbers)."""
    return (1 << (j - 1)) * (2 * k - 1)


def stage_term(j: int, k: int) -> Fraction:
    """k-th term of the stage-j series, 1/prod_{i=1}^{j}(n_k + i)."""
    return Fraction(1, rising_product(stage_element(j, k), j))


def _ap_product(start: int, step: int, count: int) -> int:
    return math.prod(start + i * step for i in range(count))


def stage_tail_enclosure(j: int, k_start: int, exact_terms: int = 64) -> RationalInterval:
    """Certified enclosure of sum_{k >= k_start} stage_term(j, k).

    The first ``exact_terms`` terms are summed exactly.  The remainder from
    index ``K = k_start + exact_terms`` on (first element ``s``, spacing
    ``d = 2^j``) is enclosed by:

    * lower: the larger of ``2^(-j^2) K^(1-j)/(j-1)`` (comparison with
      ``(2^j k)^-j`` and an integral) and the telescoping sum of
      ``1/prod_{i<j}(x + i d)`` over ``x = n + j``;
    * upper: the smaller of ``tail_closed_form(j-1, s)`` (all integers from
      ``s`` on) and the telescoping sum over ``x = n + 1 - (j-1) d`` when
      that start is positive.
    """
    if j < 2:
        raise DomainError("the stage-1 series diverges; tail enclosure needs j >= 2")
    if k_start < 1 or exact_terms < 0:
        raise DomainError("k_start must be >= 1 and exact_terms >= 0")
    d = 1 << j
    first = k_start + exact_terms
    num, den = _kernels.unit_fraction_sum(
        [rising_product(stage_element(j, k), j) for k in range(k_start, first)]
    )
    head = Fraction(num, den)
    s = stage_element(j, first)

    integral_lo = Fraction(1, (1 << (j * j)) * (j - 1) * first ** (j - 1))
    telescoping_lo = Fraction(1, (j - 1) * d * _ap_product(s + j, d, j - 1))
    lo = max(integral_lo, telescoping_lo)

    hi = tail_closed_form(j - 1, s)
    y0 = s + 1 - (j - 1) * d
    if y0 > 0:
        hi = min(hi, Fraction(1, (j - 1) * d * _ap_product(y0, d, j - 1)))
    return RationalInterval(head + lo, head + hi)


def integral_term_check(n: int) -> tuple[Fraction, Fraction]:
    """Both sides of int_0^{1/2} (1/4 - t^2)^(n-1)/(n-1)! dt = 1/prod_{i=1}^{n}(n+i).

    The left side comes from binomial expansion and termwise integration of
    the polynomial; the right side is the series term with f(n) = n.
    """
    if n < 1:
        raise DomainError("integral_term_check needs n >= 1")
    e = n - 1
    half = Fraction(1, 2)
    quarter = Fraction(1, 4)
    poly = sum(
        math.comb(e, i) * quarter ** (e - i) * (-1) ** i * half ** (2 * i + 1) / (2 * i + 1)
        for i in range(e + 1)
    )
    lhs = poly / math.factorial(e)
    return lhs, term((n, n))


def decimal_render(q: Fraction, digits: int) -> str:
    """Decimal expansion of ``q >= 0`` truncated (not rounded) to ``digits`` places."""
    q = Fraction(q)
    if q < 0:
        raise DomainError("decimal_render needs q >= 0")
    if digits < 0:
        raise DomainError("digits must be nonnegative")
    scaled = q.numerator * 10**digits // q.denominator
    whole, frac = divmod(scaled, 10**digits)
    if digits == 0:
        return str(whole)
    return f"{whole}.{frac:0{digits}d}"
