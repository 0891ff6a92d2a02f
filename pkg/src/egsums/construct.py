"""Constructive representation of a target x as sum_n 1/prod_{i=1}^{f(n)}(n+i) with f(n) -> oo.

The positive integers split into stages S_j = 2^(j-1) * (odd numbers).
Stage j contributes one number y_j chosen from an implicit finite set X_j;
each element of X_j is the stage sum of a function f_{j,k} that equals j on
a finite greedy set T and is huge (n + j + shift) elsewhere on S_j.  The
y_j are chosen greedily so that the residual x - sum y_j always lies in a
certified inner span of what later stages can still contribute.

Only the chosen k of each stage is ever materialized.  Stage parameters
(epsilon_j, m_j, vartheta_j) are computed one stage ahead.

Bounds on later stages rely on ``epsilon_{j+1} <= epsilon_j / 2`` for
``j >= 2``, which :func:`stage_epsilon` enforces.  With vartheta_i <
epsilon_{i+1}/4 this gives, for all stages after j,

    sum min X_i <= epsilon_{j+1}/32,   sum max X_i >= 63/64 epsilon_{j+1},
    sum max X_i <= 65/32 epsilon_{j+1}.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import _kernels
from .errors import DomainError, NoFeasibleChoice, SearchCapExceeded, TargetOutOfRange, ToleranceUnreachable
from .exact import (
    RationalInterval,
    format_rational,
    parse_rational,
    rising_product,
    stage_element,
    stage_tail_enclosure,
    stage_term,
    term,
)

DEFAULT_HORIZON = 64
DEFAULT_MAX_STAGES = 8
GREEDY_SCAN_CAP = 10**7

FUTURE_MIN = Fraction(1, 32)
FUTURE_MAX_LO = Fraction(63, 64)
FUTURE_MAX_HI = Fraction(65, 32)


@dataclass(frozen=True)
class TargetRange:
    theta: Fraction
    M: Fraction
    target: Fraction

    def __post_init__(self):
        for name in ("theta", "M", "target"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not 0 < self.theta < self.M:
            raise DomainError("need 0 < theta < M")
        if not self.theta <= self.target <= self.M:
            raise TargetOutOfRange(f"target {self.target} outside [{self.theta}, {self.M}]")


def stage_of(n: int) -> int:
    """The stage containing n: one more than the 2-adic valuation."""
    if n < 1:
        raise DomainError("n must be positive")
    return (n & -n).bit_length()


def stage_index_set(j: int, count: int) -> list[int]:
    if j < 1 or count < 1:
        raise DomainError("need j >= 1 and count >= 1")
    return [stage_element(j, k) for k in range(1, count + 1)]


# --- the tail condition for stage series --------------------------------------


@dataclass(frozen=True)
class Kak1Certificate:
    """Sum_{i>k} u_i >= u_k for all k >= threshold, for the stage-j series u.

    Indices in [threshold, analytic_from) are certified by the exact
    instances; indices >= analytic_from by the monotone comparison in
    ``argument``.
    """

    j: int
    threshold: int
    analytic_from: int
    instances: tuple[tuple[int, Fraction, Fraction], ...]
    argument: str


def _analytic_ok(j, k):
    d = 1 << j
    C = (j - 1) * d + j
    n = stage_element(j, k)
    return n**j >= (j - 1) * d * (n + C) ** (j - 1)


@lru_cache(maxsize=None)
def kak1_threshold(j: int, search_cap: int = 10**6) -> Kak1Certificate:
    """Certified index from which the stage-j series dominates each term by its tail.

    Beyond the analytic point, ``u_k <= n_k^-j`` and the telescoping lower
    bound of the tail past k is at least ``1/((j-1) d (n_k + C)^(j-1))`` with
    ``d = 2^j`` and ``C = (j-1) d + j``.  Since ``n^j / (n + C)^(j-1)`` is
    increasing in n, one exact check at the analytic point covers all larger
    k.  Below it, each index is checked exactly with the tail enclosure.
    """
    if j < 2:
        raise DomainError("kak1_threshold needs j >= 2")
    hi = 1
    while not _analytic_ok(j, hi):
        hi *= 2
        if hi > search_cap:
            raise SearchCapExceeded(f"analytic threshold for j={j} beyond {search_cap}")
    lo = max(1, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if _analytic_ok(j, mid):
            hi = mid
        else:
            lo = mid + 1
    analytic_from = hi
    d = 1 << j
    argument = (
        f"for k >= {analytic_from}: n_k^{j} >= {(j - 1) * d}*(n_k + {(j - 1) * d + j})^{j - 1} "
        "holds at the first such k and n^j/(n+C)^(j-1) is increasing"
    )
    instances = []
    threshold = analytic_from
    for k in range(analytic_from - 1, 0, -1):
        lower = stage_tail_enclosure(j, k + 1).lo
        u = stage_term(j, k)
        if lower < u:
            break
        instances.append((k, lower, u))
        threshold = k
    return Kak1Certificate(j, threshold, analytic_from, tuple(reversed(instances)), argument)


@lru_cache(maxsize=None)
def zero_segment_lower_bound(j: int) -> Fraction:
    """Positive lower bound for the length of the subsum segment containing 0.

    From the threshold l on, every index satisfies the tail condition, so the
    subsums of the terms k >= l fill [0, sum_{k>=l} u_k].
    """
    cert = kak1_threshold(j)
    return stage_tail_enclosure(j, cert.threshold).lo


def stage_epsilon(j: int, theta, eps_prev=None) -> Fraction:
    """epsilon_j = min(zero-segment bound, theta/2^j, epsilon_{j-1}/2)."""
    if j < 2:
        raise DomainError("epsilon is defined for j >= 2")
    eps = min(zero_segment_lower_bound(j), Fraction(theta) / 2**j)
    if eps_prev is not None:
        eps = min(eps, Fraction(eps_prev) / 2)
    return eps


def epsilon_chain(theta, upto: int) -> dict[int, Fraction]:
    """epsilon_2 .. epsilon_upto, each clamped by its predecessor."""
    eps = {}
    prev = None
    for j in range(2, upto + 1):
        prev = eps[j] = stage_epsilon(j, theta, prev)
    return eps


# --- stage plans and stage functions ---------------------------------------------


@dataclass(frozen=True)
class StagePlan:
    j: int
    eps_prime_lb: Fraction | None
    eps: Fraction | None
    eps_next: Fraction
    m: int
    theta_step: Fraction
    base: Fraction
    kak1_from: int | None

    def grid_point(self, k: int) -> Fraction:
        if not 0 <= k <= self.m:
            raise DomainError(f"grid index {k} outside 0..{self.m}")
        return self.base + k * self.theta_step

    def grid(self):
        """All m + 1 grid points (lazily)."""
        return (self.base + k * self.theta_step for k in range(self.m + 1))

    @property
    def top(self) -> Fraction:
        return self.base + self.m * self.theta_step


def stage_plan(j: int, rng: TargetRange, eps_next, eps=None) -> StagePlan:
    """Smallest m with vartheta = span/m < eps_next/4, and the equidistant grid.

    Stage 1 spans [theta/2, theta/2 + M]; stage j >= 2 spans [0, epsilon_j].
    """
    eps_next = Fraction(eps_next)
    if eps_next <= 0:
        raise DomainError("eps_next must be positive")
    if j == 1:
        span, base, eps_lb, kak = rng.M, rng.theta / 2, None, None
    else:
        eps = stage_epsilon(j, rng.theta) if eps is None else Fraction(eps)
        span, base = eps, Fraction(0)
        eps_lb = zero_segment_lower_bound(j)
        kak = kak1_threshold(j).threshold
    m = math.floor(4 * span / eps_next) + 1
    return StagePlan(j, eps_lb, eps, eps_next, m, span / m, base, kak)


def stage_subsum_greedy(j: int, p, budget, max_terms: int = GREEDY_SCAN_CAP):
    """Finite T in S_j whose stage-j subsum approximates p from below within ``budget``.

    Scans S_j in ascending order (from the threshold element when j >= 2) and
    takes each term that does not overshoot.  Returns ``(T, achieved)`` with
    ``0 <= p - achieved < budget``.
    """
    p, budget = Fraction(p), Fraction(budget)
    if budget <= 0:
        raise DomainError("budget must be positive")
    if p < 0:
        raise DomainError("target must be nonnegative")
    if j == 1:
        start = 1
    else:
        if p > zero_segment_lower_bound(j):
            raise DomainError(f"p={p} exceeds the certified zero segment of stage {j}")
        start = stage_element(j, kak1_threshold(j).threshold)
    chosen, rn, rd, scanned = _kernels.greedy_unit_scan(
        start, 1 << j, j, p.numerator, p.denominator, budget.numerator, budget.denominator, max_terms
    )
    remainder = Fraction(rn, rd)
    if remainder >= budget:
        raise SearchCapExceeded(f"stage {j} greedy did not converge within {max_terms} terms")
    return tuple(chosen), p - remainder


@dataclass(frozen=True)
class ComplementRule:
    """f(n) = n + j + shift on S_j minus T; explicit terms up to ``horizon``."""

    j: int
    shift: int
    horizon: int
    explicit: tuple[int, ...]
    bound: RationalInterval  # encloses the complement sum over all of S_j \ T

    def value(self, n: int) -> int:
        return n + self.j + self.shift


def _geometric_tail(j, h, shift):
    # n!/(2n+j+c)! shrinks by at least 1/4 per unit step of n
    return Fraction(4, 3) * term((h, h + j + shift))


def complement_fill(j: int, excluded, horizon: int, budget) -> ComplementRule:
    """Smallest shift c >= 0 with the certified complement sum below ``budget``."""
    budget = Fraction(budget)
    if budget <= 0:
        raise DomainError("budget must be positive")
    excluded = set(excluded)
    step = 1 << j
    explicit = tuple(n for n in range(stage_element(j, 1), horizon + 1, step) if n not in excluded)
    h = stage_element(j, 1)  # first element of S_j past the horizon
    if h <= horizon:
        h += step * ((horizon - h) // step + 1)
    shift = 0
    while True:
        num, den = _kernels.unit_fraction_sum([rising_product(n, n + j + shift) for n in explicit])
        exact = Fraction(num, den)
        bound = RationalInterval(exact, exact + _geometric_tail(j, h, shift))
        if bound.hi < budget:
            return ComplementRule(j, shift, horizon, explicit, bound)
        shift += 1


@dataclass(frozen=True)
class StageFunction:
    j: int
    k: int
    target: Fraction  # grid point p_{j,k}
    T: tuple[int, ...]
    t_sum: Fraction
    complement: ComplementRule
    achieved: RationalInterval

    def f(self, n: int) -> int:
        if stage_of(n) != self.j:
            raise DomainError(f"{n} is not in stage {self.j}")
        return self.j if n in self._tset else self.complement.value(n)

    @property
    def _tset(self):
        return frozenset(self.T)


def stage_function(plan: StagePlan, k: int, horizon: int = DEFAULT_HORIZON) -> StageFunction:
    """Materialize f_{j,k}: greedy T for p_{j,k}, then the complement rule."""
    p = plan.grid_point(k)
    budget = plan.theta_step / 8
    T, t_sum = stage_subsum_greedy(plan.j, p, budget)
    comp = complement_fill(plan.j, T, horizon, budget)
    return StageFunction(plan.j, k, p, T, t_sum, comp, comp.bound + t_sum)


def future_span(eps_next) -> RationalInterval:
    """Inner span certainly contained in [a_j, b_j] for the stages after j."""
    return RationalInterval(FUTURE_MIN * eps_next, FUTURE_MAX_LO * eps_next)


def future_max(eps_next) -> Fraction:
    return FUTURE_MAX_HI * eps_next


# --- building and verifying representations --------------------------------------


@dataclass
class RepresentationCertificate:
    range: TargetRange
    tolerance: Fraction
    stages: list[tuple[StagePlan, StageFunction]]
    f_prefix: list[tuple[int, int]]
    partial: Fraction
    residual: RationalInterval

    def to_dict(self) -> dict:
        return {
            "theta": format_rational(self.range.theta),
            "M": format_rational(self.range.M),
            "target": format_rational(self.range.target),
            "tolerance": format_rational(self.tolerance),
            "stages": [
                {
                    "j": plan.j,
                    "k": fn.k,
                    "m_j": str(plan.m),
                    "theta_j": format_rational(plan.theta_step),
                    "T": list(fn.T),
                    "complement_shift": fn.complement.shift,
                }
                for plan, fn in self.stages
            ],
            "f_prefix": [[n, f] for n, f in self.f_prefix],
            "partial": format_rational(self.partial),
            "residual": self.residual.to_json(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _select(plan, residual, span, horizon, max_tries=16):
    """Smallest certified-feasible grid index and its stage function."""
    need_lo = residual.hi - span.hi
    need_hi = residual.lo - span.lo
    slack = plan.theta_step / 8
    k = max(0, math.ceil((need_lo - plan.base - slack) / plan.theta_step))
    tries = 0
    while k <= plan.m and plan.grid_point(k) - slack <= need_hi and tries < max_tries:
        fn = stage_function(plan, k, horizon)
        tries += 1
        if fn.achieved.lo >= need_lo and fn.achieved.hi <= need_hi:
            return fn
        k += 1
    raise NoFeasibleChoice(f"no grid index at stage {plan.j} keeps the residual in {span}", index=plan.j)


def _assemble_prefix(functions):
    prefix = {}
    for fn in functions:
        for n in fn.T:
            prefix[n] = fn.j
        for n in fn.complement.explicit:
            prefix[n] = fn.complement.value(n)
    return sorted(prefix.items())


def build_representation(
    rng: TargetRange,
    tolerance,
    max_stages: int = DEFAULT_MAX_STAGES,
    horizon: int = DEFAULT_HORIZON,
) -> RepresentationCertificate:
    tolerance = Fraction(tolerance)
    if tolerance <= 0:
        raise DomainError("tolerance must be positive")
    eps = {2: stage_epsilon(2, rng.theta)}
    residual = RationalInterval.point(rng.target)
    stages = []
    width = None
    for j in range(1, max_stages + 1):
        eps[j + 1] = stage_epsilon(j + 1, rng.theta, eps[j] if j >= 2 else None)
        plan = stage_plan(j, rng, eps[j + 1], eps.get(j))
        span = future_span(eps[j + 1])
        fn = _select(plan, residual, span, horizon)
        residual = residual - fn.achieved
        assert span.contains_interval(residual)
        stages.append((plan, fn))
        width = future_max(eps[j + 1]) + sum(f.complement.bound.width for _, f in stages)
        if width < tolerance:
            break
    else:
        raise ToleranceUnreachable(
            f"residual width {float(width):.3e} after {max_stages} stages exceeds tolerance", achieved=width
        )
    functions = [fn for _, fn in stages]
    partial = sum((fn.t_sum + fn.complement.bound.lo for fn in functions), Fraction(0))
    return RepresentationCertificate(
        range=rng,
        tolerance=tolerance,
        stages=stages,
        f_prefix=_assemble_prefix(functions),
        partial=partial,
        residual=RationalInterval(0, width),
    )


@dataclass
class VerificationReport:
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, kind, detail):
        self.violations.append((kind, detail))

    def kinds(self) -> set[str]:
        return {k for k, _ in self.violations}


def verify_certificate(cert) -> VerificationReport:
    """Re-derive every claim of a certificate from its serialized fields.

    Accepts a :class:`RepresentationCertificate`, its dict form, or JSON
    text.  Nothing computed by the builder is trusted beyond the document.
    """
    if isinstance(cert, RepresentationCertificate):
        doc = cert.to_dict()
    elif isinstance(cert, str):
        doc = json.loads(cert)
    else:
        doc = cert
    report = VerificationReport()
    try:
        _verify(doc, report)
    except (KeyError, TypeError, ValueError) as exc:
        report.add("format", f"{type(exc).__name__}: {exc}")
    return report


def _verify(doc, report):
    theta = parse_rational(doc["theta"])
    M = parse_rational(doc["M"])
    target = parse_rational(doc["target"])
    tolerance = parse_rational(doc["tolerance"])
    try:
        rng = TargetRange(theta, M, target)
    except (DomainError, TargetOutOfRange) as exc:
        report.add("range", str(exc))
        return
    stages = doc["stages"]
    J = len(stages)
    if J == 0 or [s["j"] for s in stages] != list(range(1, J + 1)):
        report.add("stage", "stages must be numbered 1..J consecutively")
        return
    eps = epsilon_chain(theta, J + 1)
    prefix = {}
    for n, f in doc["f_prefix"]:
        if n in prefix:
            report.add("prefix", f"duplicate entry for n={n}")
        prefix[n] = f

    residual = RationalInterval.point(target)
    remainder_width = Fraction(0)
    by_stage = {}
    for n, f in prefix.items():
        by_stage.setdefault(stage_of(n), {})[n] = f
    for entry in stages:
        j, k, shift = entry["j"], entry["k"], entry["complement_shift"]
        plan = stage_plan(j, rng, eps[j + 1], eps.get(j))
        if str(plan.m) != entry["m_j"] or format_rational(plan.theta_step) != entry["theta_j"]:
            report.add("stage", f"stage {j}: m_j/theta_j disagree with recomputation")
        if not plan.theta_step < eps[j + 1] / 4:
            report.add("stage", f"stage {j}: vartheta_j >= epsilon_(j+1)/4")
        if not 0 <= k <= plan.m:
            report.add("stage", f"stage {j}: grid index {k} outside 0..{plan.m}")
            continue
        T = entry["T"]
        tset = set(T)
        if any(stage_of(n) != j for n in T) or sorted(tset) != list(T):
            report.add("stage", f"stage {j}: T is not an ascending subset of S_{j}")
        if j >= 2 and T and T[0] < stage_element(j, plan.kak1_from):
            report.add("stage", f"stage {j}: T starts below the certified threshold")
        if shift < 0:
            report.add("growth", f"stage {j}: negative complement shift")
        own = by_stage.pop(j, {})
        for n in T:
            if own.get(n) != j:
                report.add("growth", f"stage {j}: f({n}) must equal {j} on T")
        explicit = []
        for n, f in own.items():
            if n in tset:
                continue
            if f < n + j:
                report.add("growth", f"stage {j}: f({n})={f} < n + j")
            elif f != n + j + shift:
                report.add("growth", f"stage {j}: f({n})={f} does not follow the complement rule")
            explicit.append(n)
        h = stage_element(j, 1)
        while h in tset or h in own:
            h += 1 << j
        t_num, t_den = _kernels.unit_fraction_sum([rising_product(n, j) for n in T])
        c_num, c_den = _kernels.unit_fraction_sum([rising_product(n, n + j + shift) for n in explicit])
        comp_exact = Fraction(c_num, c_den)
        comp_rem = _geometric_tail(j, h, shift)
        remainder_width += comp_rem
        achieved = RationalInterval(comp_exact, comp_exact + comp_rem) + Fraction(t_num, t_den)
        p = plan.grid_point(k)
        quarter = plan.theta_step / 4
        if not (p - quarter < achieved.lo and achieved.hi < p + quarter):
            report.add("accuracy", f"stage {j}: stage sum not within vartheta/4 of p_(j,k)")
        if not comp_exact + comp_rem < plan.theta_step / 8:
            report.add("complement", f"stage {j}: complement sum not below vartheta/8")
        residual = residual - achieved
        if not future_span(eps[j + 1]).contains_interval(residual):
            report.add("containment", f"stage {j}: residual leaves the certified span of later stages")
    for j in sorted(by_stage):
        report.add("prefix", f"entries for stage {j} beyond the last built stage {J}")

    p_num, p_den = _kernels.unit_fraction_sum([rising_product(n, f) for n, f in sorted(prefix.items())])
    partial = parse_rational(doc["partial"])
    if Fraction(p_num, p_den) != partial:
        report.add("partial", "partial value does not match the prefix")
    claimed = RationalInterval.from_json(doc["residual"])
    recomputed = RationalInterval(0, future_max(eps[J + 1]) + remainder_width)
    if (target - partial) not in claimed:
        report.add("containment", "target - partial lies outside the residual interval")
    if not claimed.contains_interval(recomputed):
        report.add("residual", "residual interval does not cover the recomputed enclosure")
    if claimed.width > tolerance:
        report.add("tolerance", "residual width exceeds the tolerance")


def certificate_from_json(text: str) -> dict:
    """Parse a serialized certificate into its document form (for re-verification)."""
    return json.loads(text)


# --- chain properties ----------------------------------------------------------------


def grid_chain_holds(plan: StagePlan, next_plan: StagePlan) -> bool:
    """Exact chain span(X_{j+1}) >= eps_{j+1} - vartheta_{j+1}/2 >= eps_{j+1}/2 > 2 vartheta_j > Delta_j."""
    eps1, th1, th = next_plan.eps, next_plan.theta_step, plan.theta_step
    # consecutive elements of X_j lie within vartheta/8 of grid points vartheta apart
    delta_upper = th + th / 4
    span_lower = (next_plan.top - th1 / 4) - (next_plan.base + th1 / 4)
    return (
        th < eps1 / 4
        and span_lower >= eps1 - th1 / 2
        and eps1 - th1 / 2 >= eps1 / 2
        and eps1 / 2 > 2 * th
        and 2 * th > delta_upper
    )


def endpoint_slack(rng: TargetRange, plans: list[StagePlan]) -> tuple[Fraction, Fraction]:
    """Upper bound on sum min X_j and lower bound on sum max X_j over all stages.

    The built plans contribute their grid endpoints (within vartheta_j/4);
    stages past the last plan contribute at most ``FUTURE_MIN`` and at least
    ``FUTURE_MAX_LO`` times the next epsilon.
    """
    lo = sum((p.base + p.theta_step / 4 for p in plans), Fraction(0))
    hi = sum((p.top - p.theta_step / 4 for p in plans), Fraction(0))
    last = plans[-1]
    return lo + FUTURE_MIN * last.eps_next, hi + FUTURE_MAX_LO * last.eps_next
