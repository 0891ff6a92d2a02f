"""Covers for series values with nondecreasing f, and sorted partial-sum landscapes.

For a cap N, every nondecreasing f with f(n) -> oo has a first index m with
f(m) > N; its value lies in

    I_{N,m}(t) = sum_{n<m} 1/prod_{i=1}^{t_n}(n+i) + [0, tail_closed_form(N, m)]

where t = (f(1), ..., f(m-1)) is a nondecreasing tuple with entries <= N.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .achievement import enumeration_cap
from .errors import DomainError, EnumerationCapExceeded
from .exact import RationalInterval, decimal_render, format_rational, rising_product, tail_closed_form, term


def choose_K(M: int) -> int:
    """Smallest K with sum_{n=1}^{K} 1/(n+1) > M."""
    if M < 1:
        raise DomainError("M must be >= 1")
    total, K = Fraction(0), 0
    while total <= M:
        K += 1
        total += Fraction(1, K + 1)
    return K


def tuple_count(N: int, m: int) -> int:
    """|T_{N,m}|: nondecreasing (m-1)-tuples with entries in 1..N."""
    if N < 1 or m < 1:
        raise DomainError("need N >= 1 and m >= 1")
    return math.comb(N + m - 2, m - 1)


def enumerate_tuples(N: int, m: int, cap: int | None = None):
    """Nondecreasing (m-1)-tuples over 1..N in lexicographic order."""
    size = tuple_count(N, m)
    cap = enumeration_cap() if cap is None else cap
    if size > cap:
        raise EnumerationCapExceeded(f"{size} tuples exceed cap {cap}", size=size, cap=cap)
    return itertools.combinations_with_replacement(range(1, N + 1), m - 1)


@dataclass(frozen=True)
class CoverInterval:
    N: int
    m: int
    tuple: tuple[int, ...]
    interval: RationalInterval


def cover_interval(N: int, t) -> CoverInterval:
    t = tuple(t)
    if N < 1:
        raise DomainError("N must be >= 1")
    if any(v < 1 or v > N for v in t):
        raise DomainError(f"tuple entries must lie in 1..{N}")
    if any(b < a for a, b in zip(t, t[1:])):
        raise DomainError("tuple must be nondecreasing")
    m = len(t) + 1
    left = sum((term((n, v)) for n, v in enumerate(t, start=1)), Fraction(0))
    return CoverInterval(N, m, t, RationalInterval(left, left + tail_closed_form(N, m)))


@dataclass(frozen=True)
class CoverBounds:
    N: int
    M: int
    K: int
    exact_sum_small_m: Fraction
    clipped_bound_large_m: Fraction
    majorant_large_m: Fraction
    closed_bound: Fraction

    @property
    def small_m_below_factorial(self) -> bool:
        return self.exact_sum_small_m < Fraction(1, math.factorial(self.N))


def small_m_sum(N: int) -> Fraction:
    """Total length of all cover intervals with m <= N (count times common length)."""
    return sum((tuple_count(N, m) * tail_closed_form(N, m) for m in range(1, N + 1)), Fraction(0))


def small_m_sum_enumerated(N: int) -> Fraction:
    """The same total, built interval by interval over every tuple."""
    total = Fraction(0)
    for m in range(1, N + 1):
        for t in enumerate_tuples(N, m):
            total += cover_interval(N, t).interval.width
    return total


def closed_bound(N: int) -> Fraction:
    if N < 3:
        raise DomainError("closed bound needs N >= 3")
    return Fraction(1, math.factorial(N)) + Fraction(2**N, math.factorial(N - 2))


def cover_measure_bound(N: int, M: int, exact_terms: int = 200) -> CoverBounds:
    """Bounds on the measure of the N-th cover intersected with [0, M].

    For m > N only tuples not starting with K ones can meet [0, M].  The
    binomial-difference sum is evaluated exactly for ``exact_terms`` values
    of m; beyond that each summand is at most 2^(N-1)/((N-2)! m^2), whose
    tail sum past m0 is below 2^(N-1)/((N-2)! m0).
    """
    K = choose_K(M)
    if N < max(K, 3):
        raise DomainError(f"need N >= max(K, 3) = {max(K, 3)}")
    small = small_m_sum(N)
    fact = math.factorial(N - 2)
    clipped = Fraction(0)
    last = N + exact_terms
    for m in range(N + 1, last + 1):
        count = math.comb(m + N - 2, N - 1) - math.comb(m - K + N - 2, N - 1)
        clipped += count * tail_closed_form(N, m)
    clipped += Fraction(2 ** (N - 1), fact * last)
    majorant = Fraction(2 ** (N - 1), fact * N)
    return CoverBounds(N, M, K, small, clipped, majorant, closed_bound(N))


# --- landscapes -------------------------------------------------------------------


@dataclass(frozen=True)
class LandscapeSpec:
    length: int
    ranges: tuple[tuple[int, int], ...]
    monotone: bool = False
    top_count: int = 3000

    def __post_init__(self):
        object.__setattr__(self, "ranges", tuple(tuple(r) for r in self.ranges))
        if self.length < 1 or len(self.ranges) != self.length:
            raise DomainError("need one value range per leading term")
        if any(lo < 1 or hi < lo for lo, hi in self.ranges):
            raise DomainError("ranges must be nonempty with values >= 1")
        if self.top_count < 0:
            raise DomainError("top_count must be nonnegative")


FIGURE_ALL = LandscapeSpec(7, ((1, 5), (2, 5), (2, 5), (3, 5), (3, 5), (3, 5), (3, 5)))
FIGURE_INCREASING = LandscapeSpec(7, ((1, 8),) * 7, monotone=True)


@dataclass(frozen=True)
class Landscape:
    total: int
    entries: list[tuple[Fraction, tuple[int, ...]]]


def _table(spec):
    denominators = [
        rising_product(n, f) for n, (lo, hi) in enumerate(spec.ranges, start=1) for f in range(lo, hi + 1)
    ]
    D = math.lcm(*denominators)
    table = [[D // rising_product(n, f) for f in range(lo, hi + 1)] for n, (lo, hi) in enumerate(spec.ranges, start=1)]
    return D, table


def _block(args):
    lows, highs, table, monotone, backend = args
    kernels = _kernels.backends()[backend]
    return kernels.enumerate_sums(lows, highs, table, monotone)


def landscape(spec: LandscapeSpec, cap: int | None = None, jobs: int = 1) -> Landscape:
    """Exact partial sums sum_{n<=length} term(n, f(n)) over all admissible f, sorted.

    Ties are broken lexicographically on the assignment.  With ``jobs > 1``
    the enumeration is split by the value of f(1) across processes; the
    result does not depend on ``jobs``.
    """
    cap = enumeration_cap() if cap is None else cap
    lows = [lo for lo, _ in spec.ranges]
    highs = [hi for _, hi in spec.ranges]
    total = _kernels.count_assignments(lows, highs, spec.monotone)
    if total == 0:
        raise DomainError("no assignment satisfies the constraints")
    if total > cap:
        raise EnumerationCapExceeded(f"{total} assignments exceed cap {cap}", size=total, cap=cap)
    D, table = _table(spec)
    blocks = []
    for v in range(lows[0], highs[0] + 1):
        blocks.append(([v] + lows[1:], [v] + highs[1:], [[table[0][v - lows[0]]]] + table[1:], spec.monotone, _kernels.BACKEND))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_block, blocks))
    else:
        parts = [_block(b) for b in blocks]
    pairs = [(s, a) for sums, assignments in parts for s, a in zip(sums, assignments)]
    pairs.sort()
    entries = [(Fraction(s, D), a) for s, a in pairs[: spec.top_count]]
    return Landscape(total, entries)


def landscape_csv(result: Landscape, digits: int = 12) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rank", "sum_decimal", "sum_rational", "assignment"])
    for rank, (value, assignment) in enumerate(result.entries, start=1):
        writer.writerow([rank, decimal_render(value, digits), format_rational(value), " ".join(map(str, assignment))])
    return buf.getvalue()
