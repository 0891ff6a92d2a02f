"""Acceptance gate: one test per criterion, each with its runtime budget.

A PASS/FAIL line per criterion is printed in the terminal summary.  Run
standalone with ``python tests/test_acceptance.py``.
"""
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from egsums.achievement import EmptyInterior, SingleInterval, classify, greedy_represent, measure_limit_enclosure
from egsums.construct import TargetRange, build_representation, grid_chain_holds, stage_of, verify_certificate
from egsums.cover import FIGURE_ALL, FIGURE_INCREASING, closed_bound, landscape, landscape_csv, small_m_sum
from egsums.exact import RationalInterval, decimal_render, integral_term_check, tail_closed_form
from egsums.families import fat_cantor, geometric, triadic
from egsums.special import KNOWN_PREFIX, certified_digits, special_series_enclosure
from oracles import landscape_oracle, naive_term, partial_sum, ttt1_sum
from seqgen import random_seq, random_target

F = Fraction


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, budget {seconds}s"


@pytest.mark.acceptance(1, "special-series digits, 60 terms, width < 1e-26")
def test_special_series_digits():
    with budget(1):
        enc = special_series_enclosure(60)
        assert enc.width < F(1, 10**26)
        assert decimal_render(enc.lo, 24) == KNOWN_PREFIX
        assert certified_digits(enc, 24) == KNOWN_PREFIX


@pytest.mark.acceptance(2, "integral identity exact for n = 1..30")
def test_footnote_identity():
    with budget(1):
        for n in range(1, 31):
            lhs, rhs = integral_term_check(n)
            assert lhs == rhs == naive_term(n, n)


@pytest.mark.acceptance(3, "telescoping tails exact for N <= 6, m <= 20, K <= 200")
def test_telescoping_tails():
    with budget(5):
        for N in range(1, 7):
            for m in range(1, 21):
                # running sums give every K in m..200 from one pass
                running = F(0)
                head = tail_closed_form(N, m)
                for K in range(m, 201):
                    running += naive_term(K, N + 1)
                    assert running == head - tail_closed_form(N, K + 1)
        assert partial_sum(6, 20, 200) == tail_closed_form(6, 20) - tail_closed_form(6, 201)


@pytest.mark.acceptance(4, "classification of geometric(1/2), triadic and fat-cantor")
def test_kakeya_triple():
    with budget(5):
        v = classify(geometric(F(1, 2), 30), 30)
        assert isinstance(v, SingleInterval) and v.interval == RationalInterval(0, 1)

        seq = triadic(20)
        assert classify(seq, 20) == EmptyInterior(1)
        values = [measure_limit_enclosure(seq, d).hi for d in range(1, 21)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < F(1, 1000)

        fat = fat_cantor(30)
        assert classify(fat, 30) == EmptyInterior(1)
        assert measure_limit_enclosure(fat, 30).lo > 0


@pytest.mark.acceptance(5, "greedy representation: 100 random sequences, depth 40")
def test_greedy_property_suite():
    with budget(10):
        rnd = random.Random(20240601)
        for _ in range(100):
            seq = random_seq(rnd, depth=40)
            target = random_target(rnd, seq)
            rep = greedy_represent(target, seq, 40)
            for n, residual in enumerate(rep.trace, start=1):
                t = seq.tail_at(n)
                assert t.a.lo <= residual <= t.b.hi
                assert residual == target - sum(rep.choices[:n])
            t0, t40 = seq.tail_at(0), seq.tail_at(40)
            initial = t0.b.hi - t0.a.lo
            assert t40.b.hi - t40.a.lo < initial / 2**30

        rep = greedy_represent(F(1, 2), geometric(F(1, 2), 10), 10)
        assert rep.choices == (0,) + tuple(F(1, 2**n) for n in range(2, 11))


@pytest.mark.acceptance(6, "constructor for theta=1/4, M=4 at tolerance 1e-8")
@pytest.mark.parametrize("target", [F(1, 3), F(1, 2), F(1), F(22, 7), F(4)], ids=str)
def test_constructor(target):
    with budget(60):
        cert = build_representation(TargetRange(F(1, 4), F(4), target), F(1, 10**8))
        assert verify_certificate(cert).ok
        assert verify_certificate(cert.to_json()).ok
        assert len(cert.stages) <= 4
        T = {n for _, fn in cert.stages for n in fn.T}
        for n, f in cert.f_prefix:
            if n not in T:
                assert f >= n + stage_of(n)
        plans = [plan for plan, _ in cert.stages]
        for plan in plans:
            assert plan.theta_step < plan.eps_next / 4
        for plan, nxt in zip(plans, plans[1:]):
            assert grid_chain_holds(plan, nxt)


@pytest.mark.acceptance(7, "cover bounds: exhaustive check for N = 3..9, closed bound decay")
def test_cover_bounds():
    with budget(10):
        for N in range(3, 10):
            assert ttt1_sum(N) == small_m_sum(N) < F(1, math.factorial(N))
        values = [closed_bound(N) for N in range(7, 41)]
        assert values[0] == F(1, math.factorial(7)) + F(2**7, math.factorial(5))
        assert all(b < a for a, b in zip(values, values[1:]))
        assert closed_bound(10) < F(3, 100)


@pytest.mark.acceptance(8, "figure landscapes: counts, oracle match, byte-stable CSV")
def test_figures():
    with budget(10):
        for spec, count in ((FIGURE_ALL, 6480), (FIGURE_INCREASING, 3432)):
            first = landscape(spec, jobs=1)
            assert first.total == count
            oracle = landscape_oracle(spec.ranges, spec.monotone)
            assert len(oracle) == count
            assert first.entries == oracle[:3000]
            csv = landscape_csv(first)
            assert landscape_csv(landscape(spec, jobs=1)) == csv
            assert landscape_csv(landscape(spec, jobs=4)) == csv


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
