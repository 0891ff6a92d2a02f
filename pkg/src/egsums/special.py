"""Certified value of sum_{n>=1} 1/prod_{i=1}^{n}(n+i).

Consecutive terms satisfy ``t(n+1)/t(n) = 1/(2(2n+1))``, which is below 1/2
and decreasing, so the remainder after ``terms`` terms is at most twice the
next term.
"""
from __future__ import annotations

from fractions import Fraction

from . import _kernels
from .errors import DomainError
from .exact import RationalInterval, decimal_render, rising_product, term

KNOWN_PREFIX = "0.592296536469326575660415"


def term_ratio(n: int) -> Fraction:
    """Exact ratio t(n+1)/t(n) of consecutive diagonal terms."""
    return term((n + 1, n + 1)) / term((n, n))


def special_series_enclosure(terms: int) -> RationalInterval:
    if terms < 1:
        raise DomainError("terms must be >= 1")
    ratio = term_ratio(terms + 1)
    # the closed form 1/(2(2n+1)) is decreasing, so checking at terms+1 covers the tail
    if not ratio < Fraction(1, 2) or ratio != Fraction(1, 2 * (2 * (terms + 1) + 1)):
        raise AssertionError(f"ratio check failed at n={terms + 1}")
    num, den = _kernels.unit_fraction_sum([rising_product(n, n) for n in range(1, terms + 1)])
    partial = Fraction(num, den)
    return RationalInterval(partial, partial + 2 * term((terms + 1, terms + 1)))


def certified_digits(enclosure: RationalInterval, digits: int) -> str | None:
    """Truncated expansion shared by both endpoints, or None if they disagree."""
    lo = decimal_render(enclosure.lo, digits)
    hi = decimal_render(enclosure.hi, digits)
    return lo if lo == hi else None


def required_terms(digits: int, limit: int = 10_000) -> int:
    """Smallest term count whose enclosure certifies ``digits`` truncated places."""
    n = 1
    while n <= limit:
        if certified_digits(special_series_enclosure(n), digits) is not None:
            return n
        n += 1
    raise DomainError(f"{digits} digits not certifiable within {limit} terms")


def consistent_with(enclosure: RationalInterval, expansion: str) -> bool:
    """True if the truncated decimal ``expansion`` agrees with every value in the enclosure.

    A truncated string ``s`` with ``d`` places stands for the half-open
    interval ``[s, s + 10^-d)``; a rounded string for ``[s - 10^-d/2, s + 10^-d/2)``.
    This checks the truncation reading; see :func:`consistent_rounded`.
    """
    places = len(expansion.split(".")[1]) if "." in expansion else 0
    value = Fraction(expansion)
    return value <= enclosure.lo and enclosure.hi < value + Fraction(1, 10**places)


def consistent_rounded(enclosure: RationalInterval, expansion: str) -> bool:
    places = len(expansion.split(".")[1]) if "." in expansion else 0
    half = Fraction(1, 2 * 10**places)
    value = Fraction(expansion)
    return value - half <= enclosure.lo and enclosure.hi < value + half


def not_refuted(enclosure: RationalInterval, expansion: str) -> bool:
    """True if some value in the enclosure truncates or rounds to ``expansion``."""
    places = len(expansion.split(".")[1]) if "." in expansion else 0
    ulp = Fraction(1, 10**places)
    value = Fraction(expansion)
    return enclosure.lo < value + ulp and value - ulp / 2 <= enclosure.hi
