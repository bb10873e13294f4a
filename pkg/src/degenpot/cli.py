"""Command-line front end.

Subcommands: scan, dip, eta, theta, lyapunov, cond41, check, plot.  Long
flags only.  Exit codes: 0 ok, 1 check failure, 2 degenerate parameter,
3 configuration error, 4 precision budget exceeded.  The environment
variable DEGEN_PREC_MAX caps any requested precision as a safety rail.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import mpmath
from mpmath import mpf, mpc, workprec

from .bifurcation import lyapunov
from .checks import run_check
from .dip import PrecisionBudgetError, find_dip_radius
from .dynamics import DegenerateParameterError, TruncationError, orbit_valuations
from .families import (
    ContinuedFraction,
    DipSchedule,
    InfeasibleScheduleError,
    RationalMap,
    closeness_table,
    condition41_partial_sums,
    construct_theta,
    prop41_ratio_check,
    theta_to_json,
)
from .scan import (
    ConfigError,
    RunConfig,
    build_family,
    format_number,
    read_csv,
    run_scan,
    write_csv,
)
from .svg import scan_svg

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_DEGENERATE = 2
EXIT_CONFIG = 3
EXIT_PRECISION = 4


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so errors map to code 3."""

    def error(self, message):
        raise ConfigError(message)


def _cap_precision(prec: int) -> int:
    cap = os.environ.get("DEGEN_PREC_MAX")
    if cap is not None:
        try:
            cap = int(cap)
        except ValueError:
            raise ConfigError("DEGEN_PREC_MAX must be an integer")
        if prec > cap:
            raise ConfigError(
                "requested precision %d exceeds DEGEN_PREC_MAX=%d" % (prec, cap)
            )
    return prec


def _parse_complex(text: str) -> mpc:
    """Accept "re", "re,im", or "re+imj" style values."""
    text = text.strip()
    if "," in text:
        re_s, im_s = text.split(",", 1)
        return mpc(mpf(re_s), mpf(im_s))
    try:
        return mpc(mpf(text))
    except ValueError:
        return mpc(complex(text))


def _parse_coeffs(text: str):
    return [_parse_complex(p) for p in text.split(";")]


def _radii_triple(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError('radii must be "start:end:count"')
    return float(parts[0]), float(parts[1]), int(parts[2])


def _build_config(args) -> RunConfig:
    start, end, count = _radii_triple(getattr(args, "radii", "0.4:0.01:10"))
    schedule = DipSchedule.parse(args.schedule)
    return RunConfig(
        family=args.family,
        schedule=schedule,
        section=args.section,
        radius_start=start,
        radius_end=end,
        radius_count=count,
        angles=getattr(args, "angles", 8),
        depth=args.depth,
        prec=_cap_precision(args.prec),
        seed=args.seed,
        h=_parse_complex(args.h),
        epsilon=float(args.epsilon),
        degree=args.degree,
    )


def _add_family_flags(p):
    p.add_argument("--family", required=True)
    p.add_argument("--schedule", default="", help='dip schedule "n:g,n:g"')
    p.add_argument("--section", default="a")
    p.add_argument("--depth", type=int, default=48)
    p.add_argument("--prec", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", default="-1")
    p.add_argument("--epsilon", default="1")
    p.add_argument("--degree", type=int, default=3)


def _make_parser() -> _Parser:
    parser = _Parser(prog="degenpot")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("scan", help="sample potentials on rings of |t|")
    _add_family_flags(p)
    p.add_argument("--radii", default="0.4:0.01:10", help='"start:end:count"')
    p.add_argument("--angles", type=int, default=8)
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--svg", default=None, help="optional SVG output path")

    p = sub.add_parser("dip", help="predict, locate and measure scheduled dips")
    _add_family_flags(p)
    p.add_argument("--angles", type=int, default=8)
    p.add_argument("--slack", default="3")
    p.add_argument("--out", default=None, help="JSON report path")

    p = sub.add_parser("eta", help="orbit valuations and local height of a section")
    _add_family_flags(p)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--truncation", type=int, default=300)

    p = sub.add_parser("theta", help="build a rotation number from a schedule")
    p.add_argument("--schedule", default="")
    p.add_argument("--prec", type=int, default=512)
    p.add_argument("--closeness", type=int, default=10)
    p.add_argument("--out", default=None, help="JSON exchange file path")

    p = sub.add_parser("lyapunov", help="Monte Carlo Lyapunov exponent")
    p.add_argument("--num", required=True, help='numerator coefficients "c0;c1;.."')
    p.add_argument("--den", default="1", help="denominator coefficients")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--burn-in", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cond41", help="orbit-closeness divergence diagnostics")
    p.add_argument("--phi-num", required=True)
    p.add_argument("--phi-den", default="1")
    p.add_argument("--a0", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--map-degree", type=int, required=True, help="degree d of f_t")
    p.add_argument("--terms", type=int, default=20)
    p.add_argument("--prec", type=int, default=256)

    p = sub.add_parser("check", help="run the module invariant suites")
    p.add_argument("--filter", default=None)

    p = sub.add_parser("plot", help="re-plot an existing scan CSV as SVG")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--title", default="potential scan")

    return parser


def _cmd_scan(args) -> int:
    cfg = _build_config(args)
    rows = run_scan(cfg)
    text = write_csv(rows, args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.svg is not None:
        with open(args.svg, "w") as fh:
            fh.write(scan_svg(rows, title="%s / section %s" % (cfg.family, cfg.section)))
    return EXIT_OK


def _report_dict(rep):
    def fmt(x):
        return None if x is None else format_number(x)

    return {
        "j": rep.j,
        "n": rep.n,
        "gap_exponent": fmt(rep.gap_exponent),
        "predicted_drop": fmt(rep.predicted_drop),
        "reference_level": fmt(rep.reference_level),
        "located_radius": fmt(rep.located_radius),
        "measured_min": fmt(rep.measured_min),
        "slack": fmt(rep.slack),
        "status": rep.status,
        "metric_constant": fmt(rep.metric_constant),
        "near_miss_margin": fmt(rep.near_miss_margin),
        "rings_scanned": rep.rings_scanned,
        "precision_bits": rep.precision_bits,
        "depth": rep.depth,
        "reason": rep.reason,
    }


def _cmd_dip(args) -> int:
    cfg = _build_config(args)
    bundle = build_family(cfg)
    if len(cfg.schedule) == 0:
        raise ConfigError("dip needs a non-empty --schedule")
    reports = []
    for j, entry in enumerate(cfg.schedule, start=1):
        rep = find_dip_radius(
            bundle,
            cfg.section,
            entry,
            slack=mpf(args.slack),
            p_bits=cfg.prec,
            j=j,
            depth=cfg.depth,
            angles=cfg.angles,
        )
        reports.append(rep)
        with workprec(cfg.prec):
            loc = (
                "log radius %s" % format_number(mpmath.log(rep.located_radius), 8)
                if rep.located_radius is not None
                else "-"
            )
        print(
            "j=%d n=%d status=%s predicted=%s %s"
            % (j, entry.n, rep.status, format_number(rep.predicted_drop, 8), loc)
        )
    if args.out is not None:
        with open(args.out, "w") as fh:
            json.dump([_report_dict(r) for r in reports], fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _cmd_eta(args) -> int:
    cfg = _build_config(args)
    prec = cfg.prec
    cap = int(os.environ.get("DEGEN_PREC_MAX", 1 << 16))
    while True:
        bundle = build_family(cfg)
        section = bundle.section(cfg.section)
        if section.series_at is None:
            raise ConfigError(
                "section %r has no series model; eta needs one" % cfg.section
            )
        with workprec(prec):
            series = section.series_at(args.truncation)
        try:
            prof = orbit_valuations(
                bundle.family, series, args.steps, args.truncation, prec
            )
            break
        except TruncationError as exc:
            if "precision" not in str(exc) or 2 * prec > cap:
                raise
            prec = 2 * prec
            cfg = RunConfig(**{**cfg.__dict__, "prec": prec})
    print("precision_bits %d" % prec)
    for n, (o, e) in enumerate(zip(prof.orders, prof.eta_estimates), start=1):
        print("n=%d  o_n=%d  o_n/d^n=%s" % (n, o, e))
    print("eta %s" % prof.eta)
    return EXIT_OK


def _cmd_theta(args) -> int:
    prec = _cap_precision(args.prec)
    schedule = DipSchedule.parse(args.schedule)
    theta = construct_theta(schedule, prec)
    rows = max(args.closeness, max((e.n for e in schedule), default=0))
    with workprec(prec):
        print("theta %s" % theta)
        for n, gap in closeness_table(theta, rows, prec):
            print("n=%d  gap=%s  log=%s" % (
                n, format_number(gap, 8), format_number(mpmath.log(gap), 8)))
    if args.out is not None:
        with open(args.out, "w") as fh:
            fh.write(theta_to_json(theta, schedule, prec, closeness_rows=rows))
            fh.write("\n")
    return EXIT_OK


def _cmd_lyapunov(args) -> int:
    f = RationalMap(_parse_coeffs(args.num), _parse_coeffs(args.den))
    est = lyapunov(f, args.samples, burn_in=args.burn_in, seed=args.seed)
    print(
        "lyapunov %.12g  std_error %.3g  samples %d  seed %d"
        % (est.mean, est.std_error, est.samples, est.seed)
    )
    return EXIT_OK


def _cmd_cond41(args) -> int:
    prec = _cap_precision(args.prec)
    phi = RationalMap(_parse_coeffs(args.phi_num), _parse_coeffs(args.phi_den))
    a0 = _parse_complex(args.a0)
    h = mpmath.inf if args.h == "inf" else _parse_complex(args.h)
    sums = condition41_partial_sums(phi, a0, h, args.map_degree, args.terms, prec)
    with workprec(prec):
        for k in (1, 2, 3, 5, 10, 20, 30, 40):
            if k < args.terms:
                print("S_%d = %s" % (k, format_number(sums[k], 10)))
        print("S_%d = %s" % (args.terms, format_number(sums[args.terms], 10)))
        geom, lin = prop41_ratio_check(phi, a0, h, args.map_degree, args.terms, prec)
        print("min log-gap/(d-1)^n = %s" % format_number(geom, 10))
        print("min log-gap/n      = %s" % format_number(lin, 10))
    return EXIT_OK


def _cmd_check(args) -> int:
    return run_check(args.filter)


def _cmd_plot(args) -> int:
    rows = read_csv(args.infile)
    with open(args.out, "w") as fh:
        fh.write(scan_svg(rows, title=args.title))
    return EXIT_OK


_COMMANDS = {
    "scan": _cmd_scan,
    "dip": _cmd_dip,
    "eta": _cmd_eta,
    "theta": _cmd_theta,
    "lyapunov": _cmd_lyapunov,
    "cond41": _cmd_cond41,
    "check": _cmd_check,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return EXIT_CONFIG
        return _COMMANDS[args.command](args)
    except (ConfigError, InfeasibleScheduleError, KeyError) as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateParameterError as exc:
        print("degenerate parameter: %s" % exc, file=sys.stderr)
        return EXIT_DEGENERATE
    except PrecisionBudgetError as exc:
        print("precision budget exceeded: %s" % exc, file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
