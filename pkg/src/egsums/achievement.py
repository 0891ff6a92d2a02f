"""Sets of sums sum_n x_n with x_n drawn from finite sets X_n.

A :class:`ChoiceSeq` carries an explicit prefix X_1..X_D and certified
enclosures of the tail quantities

    a_n = sum_{k>n} min X_k,   b_n = sum_{k>n} max X_k,   r_n = b_n - a_n

for ``0 <= n <= D``.  Two tail conditions drive everything:

* cond1 at n:  r_n >= Delta_n (largest gap of X_n)  -> intervals build up;
* cond2 at n:  r_n <  delta_n (smallest gap of X_n) -> empty interior.

Finite checks only reach the horizon; a :class:`ConditionCertificate`
supplied by the sequence family is needed to extend a condition to all
larger indices.  Without one, :func:`classify` answers ``Indeterminate``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import _kernels
from .errors import ConditionNotCertified, DomainError, EnumerationCapExceeded, NoFeasibleChoice, TargetOutOfRange
from .exact import RationalInterval, format_rational

DEFAULT_ENUMERATION_CAP = 10**7


def enumeration_cap() -> int:
    """Cap on enumerated tuples; ``EGSUMS_ENUM_CAP`` overrides the default."""
    raw = os.environ.get("EGSUMS_ENUM_CAP")
    return int(raw) if raw else DEFAULT_ENUMERATION_CAP


@dataclass(frozen=True)
class ChoiceSet:
    elements: tuple[Fraction, ...]

    def __post_init__(self):
        els = tuple(Fraction(x) for x in self.elements)
        if len(els) < 2:
            raise DomainError("a choice set needs at least two elements")
        if any(b <= a for a, b in zip(els, els[1:])):
            raise DomainError("choice set elements must be strictly ascending")
        if els[0] < 0:
            raise DomainError("choice set elements must be nonnegative")
        object.__setattr__(self, "elements", els)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    @property
    def span(self) -> Fraction:
        return self.elements[-1] - self.elements[0]


@dataclass(frozen=True)
class ChoiceSetSummary:
    min: Fraction
    max: Fraction
    delta_max: Fraction
    delta_min: Fraction


@dataclass(frozen=True)
class TailEnclosure:
    a: RationalInterval
    b: RationalInterval
    r: RationalInterval


@dataclass(frozen=True)
class ConditionCertificate:
    """Proof, supplied by a sequence family, that a condition holds for all n >= from_index."""

    condition: str  # "cond1" or "cond2"
    from_index: int
    argument: str


@dataclass
class ChoiceSeq:
    sets: Sequence[ChoiceSet]
    tail: Callable[[int], TailEnclosure]
    certificate: ConditionCertificate | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return len(self.sets)

    def tail_at(self, n: int) -> TailEnclosure:
        if not 0 <= n <= self.depth:
            raise DomainError(f"tail index {n} outside 0..{self.depth}")
        if n not in self._cache:
            self._cache[n] = self.tail(n)
        return self._cache[n]

    @classmethod
    def with_remainder(cls, sets, a_rem, b_rem, r_rem=None, **kwargs) -> ChoiceSeq:
        """Build tails from the prefix plus enclosures of the sums beyond the prefix.

        ``a_rem``, ``b_rem`` (and optionally ``r_rem``) enclose the sums of
        min, max (and span) over all indices past the last explicit set.
        """
        sets = [s if isinstance(s, ChoiceSet) else ChoiceSet(tuple(s)) for s in sets]
        if r_rem is None:
            r_rem = RationalInterval(max(Fraction(0), b_rem.lo - a_rem.hi), b_rem.hi - a_rem.lo)
        D = len(sets)
        mins = [Fraction(0)] * (D + 1)
        maxs = [Fraction(0)] * (D + 1)
        for n in range(D - 1, -1, -1):
            mins[n] = mins[n + 1] + sets[n].elements[0]
            maxs[n] = maxs[n + 1] + sets[n].elements[-1]

        def tail(n):
            return TailEnclosure(
                a=a_rem + mins[n],
                b=b_rem + maxs[n],
                r=r_rem + (maxs[n] - mins[n]),
            )

        return cls(sets=sets, tail=tail, **kwargs)


# --- classification results -------------------------------------------------


@dataclass(frozen=True)
class SingleInterval:
    interval: RationalInterval  # outer enclosure of [sum min X_n, sum max X_n]
    inner: RationalInterval | None  # certainly contained in the set; None if enclosures too wide
    label = "SingleInterval"


@dataclass(frozen=True)
class IntervalUnion:
    from_index: int
    label = "IntervalUnion"


@dataclass(frozen=True)
class EmptyInterior:
    from_index: int
    label = "EmptyInterior"


@dataclass(frozen=True)
class Indeterminate:
    reason: str
    label = "Indeterminate"


Classification = SingleInterval | IntervalUnion | EmptyInterior | Indeterminate


def classification_record(c: Classification) -> dict:
    """Tagged record: ``{"kind": label, ...fields}`` with rationals as strings."""
    record = {"kind": c.label}
    if isinstance(c, SingleInterval):
        record["interval"] = c.interval.to_json()
        record["inner"] = c.inner.to_json() if c.inner is not None else None
    elif isinstance(c, Indeterminate):
        record["reason"] = c.reason
    else:
        record["from_index"] = c.from_index
    return record


def summarize(seq: ChoiceSeq) -> list[ChoiceSetSummary]:
    out = []
    for idx, s in enumerate(seq.sets, start=1):
        els = s.elements if isinstance(s, ChoiceSet) else tuple(s)
        if len(els) < 2:
            raise DomainError(f"choice set X_{idx} has fewer than two elements")
        gaps = [b - a for a, b in zip(els, els[1:])]
        out.append(ChoiceSetSummary(min=els[0], max=els[-1], delta_max=max(gaps), delta_min=min(gaps)))
    return out


def _cond1(seq, summary, n):
    """True / False / None (undecided) for r_n >= Delta_n."""
    r = seq.tail_at(n).r
    gap = summary[n - 1].delta_max
    if r.lo >= gap:
        return True
    if r.hi < gap:
        return False
    return None


def _cond2(seq, summary, n):
    """True / False / None (undecided) for r_n < delta_n."""
    r = seq.tail_at(n).r
    gap = summary[n - 1].delta_min
    if r.hi < gap:
        return True
    if r.lo >= gap:
        return False
    return None


def _holds_from(check, seq, summary, horizon):
    """Smallest n0 with the condition certified on n0..horizon, or None."""
    n0 = None
    for n in range(horizon, 0, -1):
        if check(seq, summary, n) is not True:
            break
        n0 = n
    return n0


def classify(seq: ChoiceSeq, horizon: int) -> Classification:
    if horizon < 1 or horizon > seq.depth:
        raise DomainError(f"horizon must lie in 1..{seq.depth}")
    summary = summarize(seq)
    cert = seq.certificate
    for condition, check in (("cond1", _cond1), ("cond2", _cond2)):
        if cert is None or cert.condition != condition:
            continue
        if cert.from_index > horizon + 1:
            return Indeterminate(
                f"certificate for {condition} starts at {cert.from_index}, beyond horizon {horizon}"
            )
        n0 = _holds_from(check, seq, summary, horizon)
        start = cert.from_index if n0 is None else min(n0, cert.from_index)
        if condition == "cond2":
            return EmptyInterior(start)
        if start == 1:
            t0 = seq.tail_at(0)
            outer = RationalInterval(t0.a.lo, t0.b.hi)
            inner = RationalInterval(t0.a.hi, t0.b.lo) if t0.a.hi <= t0.b.lo else None
            return SingleInterval(outer, inner)
        return IntervalUnion(start)
    n1 = _holds_from(_cond1, seq, summary, horizon)
    n2 = _holds_from(_cond2, seq, summary, horizon)
    seen = []
    if n1 is not None:
        seen.append(f"cond1 certified on {n1}..{horizon}")
    if n2 is not None:
        seen.append(f"cond2 certified on {n2}..{horizon}")
    reason = "; ".join(seen) if seen else "neither condition certified at the horizon"
    return Indeterminate(reason + "; no certificate extends it beyond the horizon")


def _merge(intervals):
    out = []
    for iv in sorted(intervals, key=lambda i: (i.lo, i.hi)):
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = RationalInterval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return out


def _common_denominator(values):
    return math.lcm(*(Fraction(v).denominator for v in values)) if values else 1


def _product_sums(sets, cap):
    """Lexicographic (choice tuple, exact sum) pairs over X_1 x ... x X_N."""
    size = math.prod(len(s) for s in sets)
    if size > cap:
        raise EnumerationCapExceeded(f"{size} tuples exceed cap {cap}", size=size, cap=cap)
    D = _common_denominator([x for s in sets for x in s])
    table = [[int(x * D) for x in s] for s in sets]
    lows = [0] * len(sets)
    highs = [len(s) - 1 for s in sets]
    sums, idx = _kernels.enumerate_sums(lows, highs, table, False)
    out = []
    for total, pos in zip(sums, idx):
        out.append((tuple(sets[i].elements[p] for i, p in enumerate(pos)), Fraction(total, D)))
    return out


def interval_union(seq: ChoiceSeq, from_index: int) -> list[RationalInterval]:
    """The set of all sums as a merged finite union of closed intervals.

    Valid once cond1 is established for every n > from_index: the later sets
    then fill [a_from, b_from], so the set is the finite sumset of
    X_1..X_{from_index} translated by that segment.
    Translates use inner bounds of the tail enclosures, so each returned
    interval is certainly contained in the set.
    """
    if from_index < 1 or from_index > seq.depth:
        raise DomainError(f"from_index must lie in 1..{seq.depth}")
    verdict = classify(seq, seq.depth)
    established = 1 if isinstance(verdict, SingleInterval) else getattr(verdict, "from_index", None)
    if not isinstance(verdict, (SingleInterval, IntervalUnion)) or established > from_index + 1:
        raise ConditionNotCertified(
            f"cond1 not established past index {from_index} (classification: {verdict.label})",
            index=from_index,
        )
    t = seq.tail_at(from_index)
    if t.a.hi > t.b.lo:
        raise ConditionNotCertified("tail enclosures too wide for an inner translate", index=from_index)
    segment = RationalInterval(t.a.hi, t.b.lo)
    pieces = [segment + total for _, total in _product_sums(list(seq.sets[:from_index]), enumeration_cap())]
    return _merge(pieces)


def greedy_step(target_residual, choices, next_span: RationalInterval) -> Fraction:
    """Smallest y in ``choices`` with ``target_residual - y`` inside ``next_span``."""
    for y in choices:
        if (target_residual - y) in next_span:
            return Fraction(y)
    raise NoFeasibleChoice(f"no choice keeps residual {target_residual} inside {next_span}")


@dataclass(frozen=True)
class GreedyRepresentation:
    choices: tuple[Fraction, ...]
    residual_interval: RationalInterval  # certified enclosure of [a_depth, b_depth]
    residual: Fraction  # exact target - sum(choices)
    trace: tuple[Fraction, ...] = ()  # residual after each step, for invariant checks


def _inner(t: TailEnclosure) -> RationalInterval | None:
    if t.a.hi > t.b.lo:
        return None
    return RationalInterval(t.a.hi, t.b.lo)


def greedy_represent(target, seq: ChoiceSeq, depth: int) -> GreedyRepresentation:
    """Pick x_1..x_depth greedily so that target - sum x_n stays in [a_N, b_N].

    cond1 must be certified at every index <= depth, either directly or in
    the stronger form span(X_{n+1}) >= Delta_n.
    """
    target = Fraction(target)
    if depth < 1 or depth > seq.depth:
        raise DomainError(f"depth must lie in 1..{seq.depth}")
    start = _inner(seq.tail_at(0))
    if start is None or target not in start:
        raise TargetOutOfRange(f"target {target} not certified inside the interval of all sums")
    summary = summarize(seq)
    for n in range(1, depth + 1):
        stronger = n < seq.depth and seq.sets[n].span >= summary[n - 1].delta_max
        if not stronger and _cond1(seq, summary, n) is not True:
            raise ConditionNotCertified(f"cond1 not certified at index {n}", index=n)
    residual = target
    chosen = []
    trace = []
    for n in range(1, depth + 1):
        span = _inner(seq.tail_at(n))
        if span is None:
            raise ConditionNotCertified(f"tail enclosure at {n} too wide", index=n)
        try:
            y = greedy_step(residual, seq.sets[n - 1], span)
        except NoFeasibleChoice as exc:
            raise NoFeasibleChoice(str(exc), index=n) from None
        residual -= y
        # loop invariant: target - sum_{k<=n} x_k in [a_n, b_n]
        if residual not in span:
            raise AssertionError(f"greedy invariant broken at index {n}")
        chosen.append(y)
        trace.append(residual)
    t = seq.tail_at(depth)
    return GreedyRepresentation(
        choices=tuple(chosen),
        residual_interval=RationalInterval(t.a.lo, t.b.hi),
        residual=residual,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class TruncationCover:
    depth: int
    intervals: tuple[tuple[tuple[Fraction, ...], RationalInterval], ...]
    disjoint: bool

    def union(self) -> list[RationalInterval]:
        return _merge([iv for _, iv in self.intervals])

    def to_csv(self) -> str:
        """Rows ``tuple;lo;hi`` in lexicographic tuple order."""
        rows = ["tuple;lo;hi"]
        for choice, iv in self.intervals:
            rows.append(";".join([" ".join(format_rational(x) for x in choice), *iv.to_json()]))
        return "\n".join(rows) + "\n"


def truncation_cover(seq: ChoiceSeq, depth: int, cap: int | None = None) -> TruncationCover:
    """The intervals sum x_n + [a_N, b_N] over all N-tuples, with a disjointness flag."""
    if depth < 0 or depth > seq.depth:
        raise DomainError(f"depth must lie in 0..{seq.depth}")
    cap = enumeration_cap() if cap is None else cap
    t = seq.tail_at(depth)
    span = RationalInterval(t.a.lo, t.b.hi)
    if depth == 0:
        return TruncationCover(0, (((), span),), True)
    pairs = _product_sums(list(seq.sets[:depth]), cap)
    intervals = tuple((choice, span + total) for choice, total in pairs)
    ordered = sorted((iv for _, iv in intervals), key=lambda i: i.lo)
    disjoint = all(a.hi < b.lo for a, b in zip(ordered, ordered[1:]))
    return TruncationCover(depth, intervals, disjoint)


def measure_limit_enclosure(seq: ChoiceSeq, depth: int) -> RationalInterval:
    """Enclosure of |X_1|...|X_depth| * r_depth, an upper bound on the measure of the set.

    Requires cond2 certified at every index <= depth; the values decrease in
    depth towards the measure.
    """
    if depth < 1 or depth > seq.depth:
        raise DomainError(f"depth must lie in 1..{seq.depth}")
    summary = summarize(seq)
    for n in range(1, depth + 1):
        if _cond2(seq, summary, n) is not True:
            raise ConditionNotCertified(f"cond2 not certified at index {n}", index=n)
    count = math.prod(len(s) for s in seq.sets[:depth])
    return seq.tail_at(depth).r.scale(count)
