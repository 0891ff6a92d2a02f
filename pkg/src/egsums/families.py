"""Built-in choice sequences with certified tails and condition certificates."""
from __future__ import annotations

import re
from fractions import Fraction

from . import _kernels
from .achievement import ChoiceSeq, ConditionCertificate
from .errors import DomainError
from .exact import RationalInterval, parse_rational, stage_tail_enclosure, stage_term

ZERO = RationalInterval(0, 0)


def geometric(ratio, depth: int) -> ChoiceSeq:
    """X_n = {0, ratio^n}; r_n / Delta_n = ratio/(1 - ratio) for every n."""
    ratio = Fraction(ratio)
    if not 0 < ratio < 1:
        raise DomainError("ratio must lie in (0, 1)")
    sets = [(0, ratio**n) for n in range(1, depth + 1)]
    rem = RationalInterval.point(ratio ** (depth + 1) / (1 - ratio))
    scale = ratio / (1 - ratio)
    cert = ConditionCertificate(
        "cond1" if scale >= 1 else "cond2",
        1,
        f"r_n = {scale} * x_n for every n (scale invariance of the geometric series)",
    )
    return ChoiceSeq.with_remainder(sets, ZERO, rem, certificate=cert, name=f"geometric({ratio})")


def triadic(depth: int) -> ChoiceSeq:
    seq = geometric(Fraction(1, 3), depth)
    seq.name = "triadic"
    return seq


def _fat_cantor_tail(start: int, extra: int = 64) -> RationalInterval:
    """Enclosure of sum_{k>=start} 1/(2^k - 1).

    Terms up to L = start + extra - 1 are exact; for k > L,
    2^-k <= 1/(2^k - 1) <= 2^-k * 2^L/(2^L - 1).
    """
    L = start + extra - 1
    num, den = _kernels.unit_fraction_sum([2**k - 1 for k in range(start, L + 1)])
    head = Fraction(num, den)
    return RationalInterval(head + Fraction(1, 2**L), head + Fraction(1, 2**L - 1))


def fat_cantor(depth: int) -> ChoiceSeq:
    """X_n = {0, 1/(2^n - 1)}.

    For k > n, 1/(2^k - 1) < 2^(n-k)/(2^n - 1), so r_n < 1/(2^n - 1) = delta_n
    for every n.
    """
    sets = [(0, Fraction(1, 2**n - 1)) for n in range(1, depth + 1)]
    cert = ConditionCertificate(
        "cond2", 1, "1/(2^k-1) < 2^(n-k)/(2^n-1) for k > n, summing to r_n < 1/(2^n-1)"
    )
    return ChoiceSeq.with_remainder(
        sets, ZERO, _fat_cantor_tail(depth + 1), certificate=cert, name="fat-cantor"
    )


def stage_series(j: int, depth: int) -> ChoiceSeq:
    """X_k = {0, u_k} for the stage-j series u_k = 1/prod_{i=1}^{j}(2^(j-1)(2k-1) + i)."""
    from .construct import kak1_threshold

    cert = kak1_threshold(j)
    sets = [(0, stage_term(j, k)) for k in range(1, depth + 1)]
    rem = stage_tail_enclosure(j, depth + 1)
    certificate = ConditionCertificate("cond1", cert.threshold, cert.argument)
    return ChoiceSeq.with_remainder(sets, ZERO, rem, certificate=certificate, name=f"eg-stage({j})")


def finite_support(sets) -> ChoiceSeq:
    """Sets X_1..X_D followed by X_n = {0} (a zero tail)."""
    return ChoiceSeq.with_remainder(sets, ZERO, ZERO, name="finite")


_SERIES = re.compile(r"(?P<name>[a-z-]+)(\((?P<arg>[^)]*)\))?")


def by_name(spec: str, depth: int) -> ChoiceSeq:
    """Resolve ``geometric(r)``, ``triadic``, ``fat-cantor`` or ``eg-stage(j)``."""
    m = _SERIES.fullmatch(spec.strip())
    if not m:
        raise KeyError(spec)
    name, arg = m["name"], m["arg"]
    if name == "geometric" and arg:
        return geometric(parse_rational(arg), depth)
    if name == "triadic" and arg is None:
        return triadic(depth)
    if name == "fat-cantor" and arg is None:
        return fat_cantor(depth)
    if name == "eg-stage" and arg:
        return stage_series(int(arg), depth)
    raise KeyError(spec)

