import json
import random
from fractions import Fraction

import pytest

from egsums.construct import (
    TargetRange,
    build_representation,
    complement_fill,
    endpoint_slack,
    epsilon_chain,
    grid_chain_holds,
    kak1_threshold,
    stage_index_set,
    stage_of,
    stage_plan,
    stage_subsum_greedy,
    verify_certificate,
    zero_segment_lower_bound,
)
from egsums.errors import DomainError, TargetOutOfRange, ToleranceUnreachable
from oracles import naive_rising, naive_term, stage_elements

F = Fraction
RANGE = dict(theta=F(1, 4), M=F(4))


@pytest.mark.parametrize("j,count,expected", [(1, 4, [1, 3, 5, 7]), (2, 3, [2, 6, 10]), (3, 2, [4, 12])])
def test_stage_index_set(j, count, expected):
    assert stage_index_set(j, count) == expected


def test_partition_property():
    seen = {}
    for j in range(1, 18):
        for n in stage_index_set(j, 2 ** (17 - j) + 1):
            if n <= 10**5:
                assert n not in seen
                seen[n] = j
    assert sorted(seen) == list(range(1, 10**5 + 1))
    for n in range(1, 10**5 + 1, 37):
        v = 0
        while n % 2 ** (v + 1) == 0:
            v += 1
        assert stage_of(n) == seen[n] == v + 1


def _scaled_tail_lower(j, k, count, scale):
    """Integer lower bound of scale * sum_{i=k+1}^{k+count} u_i."""
    return sum(scale // naive_rising(n, j) for n in stage_elements(j, count, k + 1))


@pytest.mark.parametrize("j", [2, 3])
def test_kak1_threshold_brute_force(j):
    cert = kak1_threshold(j)
    scale = 10**80
    for k in range(cert.threshold, cert.threshold + 1000, 7):
        u_scaled = -(-scale // naive_rising(stage_elements(j, 1, k)[0], j))  # ceiling
        assert _scaled_tail_lower(j, k, 6 * k + 50, scale) >= u_scaled


@pytest.mark.parametrize("j", [2, 3, 4, 5])
def test_kak1_certificate_instances(j):
    cert = kak1_threshold(j)
    assert cert.threshold <= cert.analytic_from
    for k, lower, u in cert.instances:
        assert lower >= u == naive_term(stage_elements(j, 1, k)[0], j)
    if cert.threshold > 1:
        # the index below the threshold is not certified by the enclosure
        from egsums.exact import stage_tail_enclosure, stage_term

        assert stage_tail_enclosure(j, cert.threshold).lo < stage_term(j, cert.threshold - 1)


def test_zero_segment_bounds():
    b2, b3 = zero_segment_lower_bound(2), zero_segment_lower_bound(3)
    assert 0 < b3 < b2
    # oracle: exact partial sum of the tail from the threshold plus a crude remainder
    l2 = kak1_threshold(2).threshold
    partial = sum((naive_term(n, 2) for n in stage_elements(2, 400, l2)), F(0))
    assert b2 <= partial + F(1, 16 * (l2 + 398))


def test_epsilon_chain_shape():
    eps = epsilon_chain(F(1, 4), 6)
    for j in range(2, 7):
        assert 0 < eps[j] <= F(1, 4) / 2**j
        assert eps[j] <= zero_segment_lower_bound(j)
    assert all(eps[j + 1] <= eps[j] / 2 for j in range(2, 6))


def test_stage_plan_stage_one():
    rng = TargetRange(F(1, 4), F(1), F(1, 2))
    plan = stage_plan(1, rng, F(1, 10))
    # vartheta_1 = 1/m must be strictly below 1/40
    assert plan.m == 41 and plan.theta_step == F(1, 41)
    assert plan.grid_point(0) == F(1, 8) and plan.top == F(1, 8) + 1


def test_stage_plan_later_stage():
    rng = TargetRange(**RANGE, target=1)
    plan = stage_plan(2, rng, F(1, 10**4), eps=F(1, 100))
    assert plan.m == 401
    assert plan.grid_point(0) == 0 and plan.top == F(1, 100)
    assert plan.theta_step < F(1, 4 * 10**4) <= F(1, 100) / (plan.m - 1)


def test_stage_plan_rejects_nonpositive():
    with pytest.raises(DomainError):
        stage_plan(1, TargetRange(**RANGE, target=1), 0)


@pytest.mark.parametrize("p,T", [(F(1, 2), (1,)), (F(3, 4), (1, 3))])
def test_stage_one_greedy_examples(p, T):
    got, achieved = stage_subsum_greedy(1, p, F(1, 100))
    assert got == T and achieved == p


def test_stage_one_greedy_small_target():
    T, achieved = stage_subsum_greedy(1, F(1, 1000), F(1, 10**9))
    assert T[0] == 999
    assert 0 <= F(1, 1000) - achieved < F(1, 10**9)


@pytest.mark.parametrize("j,p", [(2, F(1, 50)), (3, F(1, 20000)), (4, F(1, 10**8))])
def test_stage_greedy_accuracy(j, p):
    budget = F(1, 10**9) * p
    T, achieved = stage_subsum_greedy(j, p, budget)
    assert all(stage_of(n) == j for n in T)
    assert achieved == sum((naive_term(n, j) for n in T), F(0))
    assert 0 <= p - achieved < budget


def test_stage_greedy_rejects_infeasible():
    with pytest.raises(DomainError):
        stage_subsum_greedy(2, zero_segment_lower_bound(2) * 2, F(1, 100))
    with pytest.raises(DomainError):
        stage_subsum_greedy(1, F(1), 0)


def test_complement_fill_generous_budget():
    rule = complement_fill(1, {1, 3}, 64, F(1))
    assert rule.shift == 0
    assert all(rule.value(n) >= n + 1 for n in rule.explicit)
    assert 1 not in rule.explicit and 5 in rule.explicit


def test_complement_fill_tight_budget_forces_shift():
    loose = complement_fill(1, {1, 3}, 64, F(1))
    tight = complement_fill(1, {1, 3}, 64, loose.bound.hi)
    assert tight.shift >= 1 and tight.bound.hi < loose.bound.hi
    # the exact part matches a direct sum
    direct = sum((naive_term(n, n + 1 + tight.shift) for n in tight.explicit), F(0))
    assert tight.bound.lo == direct


def _cert(target, tol=F(1, 10**8)):
    return build_representation(TargetRange(**RANGE, target=target), tol)


def test_represent_half():
    cert = _cert(F(1, 2), F(1, 10**6))
    assert verify_certificate(cert).ok
    assert cert.residual.width < F(1, 10**6)
    assert (F(1, 2) - cert.partial) in cert.residual


@pytest.mark.parametrize("target", [F(1, 4), F(4)])
def test_represent_endpoints(target):
    assert verify_certificate(_cert(target)).ok


def test_out_of_range():
    with pytest.raises(TargetOutOfRange):
        TargetRange(**RANGE, target=F(5))
    with pytest.raises(DomainError):
        TargetRange(theta=F(2), M=F(1), target=F(1))


def test_tolerance_unreachable():
    with pytest.raises(ToleranceUnreachable) as info:
        build_representation(TargetRange(**RANGE, target=1), F(1, 10**40), max_stages=2)
    assert info.value.achieved > F(1, 10**40)


def test_certificate_properties():
    cert = _cert(F(22, 7))
    plans = [plan for plan, _ in cert.stages]
    rng = cert.range
    for (plan, fn), nxt in zip(cert.stages, plans[1:] + [None]):
        assert plan.theta_step < plan.eps_next / 4
        assert abs(fn.achieved.lo - fn.target) < plan.theta_step / 4
        assert abs(fn.achieved.hi - fn.target) < plan.theta_step / 4
        assert all(fn.f(n) == plan.j for n in fn.T)
        assert all(fn.f(n) >= n + plan.j for n in fn.complement.explicit)
        if nxt is not None:
            assert grid_chain_holds(plan, nxt)
    lo, hi = endpoint_slack(rng, plans)
    assert lo < rng.theta and hi > rng.M


def test_f_prefix_growth():
    cert = _cert(F(1))
    T = {n for _, fn in cert.stages for n in fn.T}
    for n, f in cert.f_prefix:
        j = stage_of(n)
        assert f == j if n in T else f >= n + j


def test_partial_recomputed_by_oracle():
    cert = _cert(F(1, 3))
    assert cert.partial == sum((naive_term(n, f) for n, f in cert.f_prefix), F(0))


def test_json_round_trip_and_order():
    cert = _cert(F(1, 2))
    text = cert.to_json()
    doc = json.loads(text)
    assert list(doc) == ["theta", "M", "target", "tolerance", "stages", "f_prefix", "partial", "residual"]
    assert list(doc["stages"][0]) == ["j", "k", "m_j", "theta_j", "T", "complement_shift"]
    assert verify_certificate(text).ok
    assert _cert(F(1, 2)).to_json() == text


def _tamper(cert, edit):
    doc = json.loads(cert.to_json())
    edit(doc)
    return verify_certificate(doc)


def test_verifier_catches_growth_violation():
    cert = _cert(F(1, 2))
    T = {n for s in cert.to_dict()["stages"] for n in s["T"]}

    def lower(doc):
        for entry in doc["f_prefix"]:
            if entry[0] not in T:
                entry[1] = entry[0]  # below n + j
                return

    report = _tamper(cert, lower)
    assert not report.ok and "growth" in report.kinds()


def test_verifier_catches_residual_tampering():
    cert = _cert(F(1, 2))

    def shift(doc):
        doc["residual"] = ["1/1", "2/1"]

    report = _tamper(cert, shift)
    assert not report.ok and "containment" in report.kinds()


def test_verifier_catches_other_edits():
    cert = _cert(F(1, 2))
    assert "partial" in _tamper(cert, lambda d: d.update(partial="1/3")).kinds()
    assert "range" in _tamper(cert, lambda d: d.update(target="9/1")).kinds()
    assert "format" in _tamper(cert, lambda d: d.pop("stages")).kinds()
    assert not _tamper(cert, lambda d: d["stages"][0].update(k=d["stages"][0]["k"] + 1)).ok


def test_random_targets_verify():
    rnd = random.Random(2024)
    for _ in range(100):
        target = F(1, 4) + F(rnd.randint(0, 10**6), 10**6) * F(15, 4)
        cert = build_representation(TargetRange(**RANGE, target=target), F(1, 10**6))
        assert verify_certificate(cert).ok, target
