"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 precondition
or range violation, 4 tolerance/digits unreachable, 5 enumeration cap.
Reports go to stdout as ``key=value`` lines.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import _kernels
from .achievement import EmptyInterior, SingleInterval, classify, measure_limit_enclosure
from .construct import TargetRange, build_representation, verify_certificate
from .cover import LandscapeSpec, cover_measure_bound, landscape, landscape_csv, small_m_sum_enumerated
from .errors import ConditionNotCertified, DomainError, EnumerationCapExceeded, TargetOutOfRange, ToleranceUnreachable
from .exact import decimal_render, format_rational, integral_term_check, parse_rational
from .families import by_name
from .special import (
    KNOWN_PREFIX,
    certified_digits,
    consistent_rounded,
    consistent_with,
    not_refuted,
    required_terms,
    special_series_enclosure,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RANGE, EXIT_UNREACHABLE, EXIT_CAP = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _rational(text):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(**pairs):
    for key, value in pairs.items():
        if isinstance(value, Fraction):
            value = format_rational(value)
        elif isinstance(value, bool):
            value = str(value).lower()
        print(f"{key}={value}")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_represent(args):
    try:
        rng = TargetRange(args.theta, args.M, args.target)
    except TargetOutOfRange as exc:
        print(f"error={exc}", file=sys.stderr)
        return EXIT_RANGE
    except DomainError as exc:
        print(f"error={exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cert = build_representation(rng, args.tol, max_stages=args.max_stages)
    except ToleranceUnreachable as exc:
        print(f"error={exc}", file=sys.stderr)
        _emit(achieved_width=exc.achieved)
        return EXIT_UNREACHABLE
    report = verify_certificate(cert)
    _write(args.out, cert.to_json() + "\n")
    _emit(
        stages=len(cert.stages),
        prefix_entries=len(cert.f_prefix),
        partial_decimal=_down(cert.partial, 30),
        residual_width_at_most=_up(cert.residual.width, _exponent_floor(cert.residual.width) + 6),
        verified=report.ok,
    )
    for kind, detail in report.violations:
        print(f"violation={kind}: {detail}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_verify(args):
    text = Path(args.cert).read_text(encoding="utf-8")
    report = verify_certificate(text)
    _emit(verified=report.ok, violations=len(report.violations))
    for kind, detail in report.violations:
        print(f"violation={kind}: {detail}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _parse_ranges(text, length):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    ranges = []
    for p in parts:
        lo, sep, hi = p.partition("-")
        ranges.append((int(lo), int(hi)) if sep else (int(lo), int(lo)))
    if len(ranges) == 1:
        ranges *= length
    if len(ranges) != length:
        raise UsageError(f"expected 1 or {length} ranges, got {len(ranges)}")
    return tuple(ranges)


def cmd_landscape(args):
    try:
        spec = LandscapeSpec(args.length, _parse_ranges(args.ranges, args.length), args.monotone, args.top)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error={exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = landscape(spec, jobs=args.jobs)
    except EnumerationCapExceeded as exc:
        print(f"error={exc}", file=sys.stderr)
        return EXIT_CAP
    except DomainError as exc:
        print(f"error={exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(args.out, landscape_csv(result))
    _emit(total=result.total, emitted=len(result.entries), backend=_kernels.BACKEND)
    return EXIT_OK


def cmd_classify(args):
    try:
        seq = by_name(args.series, args.depth)
    except KeyError:
        print(f"error=unknown series {args.series!r}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error={exc}", file=sys.stderr)
        return EXIT_USAGE
    verdict = classify(seq, args.depth)
    _emit(series=seq.name, classification=verdict.label)
    if isinstance(verdict, SingleInterval):
        _emit(interval=str(verdict.interval))
    elif hasattr(verdict, "from_index"):
        _emit(from_index=verdict.from_index)
    else:
        _emit(reason=verdict.reason)
    if isinstance(verdict, EmptyInterior) and verdict.from_index == 1:
        try:
            enc = measure_limit_enclosure(seq, args.depth)
        except ConditionNotCertified as exc:
            _emit(measure_note=str(exc))
        else:
            _emit(measure_lo=_down(enc.lo), measure_hi=_up(enc.hi), measure_positive=enc.lo > 0)
    return EXIT_OK


def cmd_bounds(args):
    try:
        b = cover_measure_bound(args.N, args.M)
    except DomainError as exc:
        print(f"error={exc}", file=sys.stderr)
        return EXIT_RANGE
    enumerated = small_m_sum_enumerated(args.N) if args.enumerate else None
    _emit(
        N=b.N,
        M=b.M,
        K=b.K,
        exact_sum_small_m=b.exact_sum_small_m,
        inverse_factorial=Fraction(1, math.factorial(b.N)),
        small_m_below_inverse_factorial=b.small_m_below_factorial,
        clipped_bound_large_m=b.clipped_bound_large_m,
        majorant_large_m=b.majorant_large_m,
        closed_bound=b.closed_bound,
        closed_bound_decimal=decimal_render(b.closed_bound, 12),
    )
    if enumerated is not None:
        _emit(enumerated_matches=enumerated == b.exact_sum_small_m)
    return EXIT_OK if b.small_m_below_factorial else EXIT_FAIL


def cmd_verify_special(args):
    if args.terms < 1 or args.digits < 1:
        print("error=terms and digits must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    enc = special_series_enclosure(args.terms)
    digits = certified_digits(enc, args.digits)
    checks = [integral_term_check(n) for n in range(1, min(args.terms, 30) + 1)]
    shown = args.digits + 4
    _emit(
        terms=args.terms,
        enclosure_lo=decimal_render(enc.lo, shown),
        enclosure_hi=decimal_render(enc.hi, shown),
        width_below=f"1e-{_exponent_floor(enc.width)}",
        integral_check=all(lhs == rhs for lhs, rhs in checks),
        integral_checked_terms=len(checks),
    )
    places = min(args.digits, len(KNOWN_PREFIX) - 2)
    known = KNOWN_PREFIX[: places + 2]
    _emit(
        known_prefix=known,
        known_prefix_not_refuted=not_refuted(enc, known),
        consistent_truncated=consistent_with(enc, known),
        consistent_rounded=consistent_rounded(enc, known),
    )
    if digits is None:
        _emit(certified_digits="none", required_terms=required_terms(args.digits))
        return EXIT_UNREACHABLE
    _emit(certified_digits=digits)
    return EXIT_OK


def _down(x, digits=15):
    """Decimal at or below x."""
    return decimal_render(x, digits)


def _up(x, digits=15):
    """Decimal at or above x."""
    scaled = x * 10**digits
    if scaled.denominator == 1:
        return decimal_render(x, digits)
    return decimal_render(Fraction(math.floor(scaled) + 1, 10**digits), digits)


def _exponent_floor(width):
    """Largest e with width < 10^-e."""
    e = 0
    while width < Fraction(1, 10 ** (e + 1)):
        e += 1
    return e


def build_parser():
    parser = argparse.ArgumentParser(prog="egsums", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("represent", help="certify a series representation of a target")
    p.add_argument("--target", type=_rational, required=True)
    p.add_argument("--theta", type=_rational, required=True)
    p.add_argument("--M", type=_rational, required=True)
    p.add_argument("--tol", type=_rational, default=Fraction(1, 10**6))
    p.add_argument("--max-stages", type=int, default=8)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("verify", help="re-verify a certificate file")
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("landscape", help="sorted partial sums over constrained f")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--ranges", required=True, help="'lo-hi' per index, comma separated, or one range for all")
    p.add_argument("--monotone", action="store_true")
    p.add_argument("--top", type=int, default=3000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("classify", help="classify the sum set of a built-in series")
    p.add_argument("--series", required=True, help="geometric(r), triadic, fat-cantor or eg-stage(j)")
    p.add_argument("--depth", type=int, default=20)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bounds", help="measure bounds for the nondecreasing-f cover")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--enumerate", action="store_true", help="also recount the small-m sum tuple by tuple")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify-special", help="certified digits of sum 1/prod_{i<=n}(n+i)")
    p.add_argument("--terms", type=int, default=60)
    p.add_argument("--digits", type=int, default=24)
    p.set_defaults(func=cmd_verify_special)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
