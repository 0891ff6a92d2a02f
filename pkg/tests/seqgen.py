"""Random choice sequences with span(X_{n+1}) >= Delta_n and exact geometric tails.

X_n = rho^(n-1) * Y_n where every Y_n has span 1 and largest gap <= rho.
Past the explicit prefix the sets repeat a fixed shape Y*, so the remainder
sums are exact geometric series.
"""
import random
from fractions import Fraction

from egsums.achievement import ChoiceSeq
from egsums.exact import RationalInterval

RATIOS = (Fraction(1, 2), Fraction(5, 9), Fraction(4, 7), Fraction(7, 12))


def random_shape(rnd: random.Random, rho: Fraction, size: int | None = None):
    size = size or rnd.randint(3, 5)
    offset = Fraction(rnd.randint(0, 250), 1000)
    while True:
        inner = sorted({Fraction(rnd.randint(1, 999), 1000) for _ in range(size - 2)})
        pts = [Fraction(0), *inner, Fraction(1)]
        if len(pts) == size and max(b - a for a, b in zip(pts, pts[1:])) <= rho:
            return tuple(offset + p for p in pts)


def random_seq(rnd: random.Random, depth: int = 40) -> ChoiceSeq:
    rho = rnd.choice(RATIOS)
    sets = [tuple(rho ** (n - 1) * y for y in random_shape(rnd, rho)) for n in range(1, depth + 1)]
    tail_shape = random_shape(rnd, rho)
    geo = rho**depth / (1 - rho)  # sum_{n > depth} rho^(n-1)
    a_rem = RationalInterval.point(tail_shape[0] * geo)
    b_rem = RationalInterval.point(tail_shape[-1] * geo)
    seq = ChoiceSeq.with_remainder(sets, a_rem, b_rem, name=f"random(rho={rho})")
    seq.rho = rho
    return seq


def random_target(rnd: random.Random, seq: ChoiceSeq) -> Fraction:
    t = seq.tail_at(0)
    lo, hi = t.a.hi, t.b.lo
    pick = rnd.random()
    if pick < 0.05:
        return lo
    if pick < 0.10:
        return hi
    u = Fraction(rnd.randint(0, 10**9), 10**9)
    return lo + u * (hi - lo)
