"""Command-line front end.

Subcommands wrap the library modules one-to-one; every run is a pure
function of its full argument vector (seeds are mandatory, there is no
wall-clock fallback).  Exit codes are a stable contract:

    0  success
    2  argument error (including 0-straddling count intervals)
    3  infeasible input (degree handshake, unbalanced demands, bad files)
    4  experiment finished but failed its acceptance threshold

Outputs are CSV/JSON only; plotting is left to downstream tools.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (
    InfeasibleConfigError,
    LocalLawConfig,
    concentration_tail_check,
    convergence_rate_sweep,
    estimate_regularity_probability,
    regular_factor_frequency,
    run_local_law_er,
    run_local_law_regular,
)
from .factors import FactorSpec, find_f_factor
from .graphs import (
    DegreeSpec,
    EdgeListFormatError,
    is_regular,
    normalized_er,
    normalized_regular,
    read_edge_list,
    sample_er,
    sample_regular,
    write_edge_list,
)
from .mplaw import Interval, LimitLaw, cdf, sym_density
from .spectra import Spectrum, bipartite_spectrum, window_pair, write_spectrum_csv

THREADS_ENV = "BIPSPEC_THREADS"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(2, f"expected 'lo,hi', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise CliError(2, f"expected numeric 'lo,hi', got {text!r}") from None


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise CliError(2, f"expected comma-separated integers, got {text!r}") from None


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise CliError(2, f"expected comma-separated numbers, got {text!r}") from None


def _resolve_threads(value) -> int:
    if value is None:
        value = os.environ.get(THREADS_ENV, "1")
    try:
        threads = int(value)
    except ValueError:
        raise CliError(2, f"thread count must be an integer, got {value!r}") from None
    if threads < 0:
        raise CliError(2, "thread count must be >= 0 (0 = all cores)")
    return threads


def _require(args, names: list[str]) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise CliError(2, f"missing required argument --{name}")


def _emit_report(report, args) -> None:
    if getattr(args, "out", None):
        report.write_json(args.out)
    if getattr(args, "json", False):
        sys.stdout.write(report.to_json_bytes().decode("ascii"))


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_mp_eval(args) -> int:
    _require(args, ["alpha"])
    if args.alpha < 1:
        raise CliError(2, f"aspect ratio must be >= 1, got {args.alpha}")
    if args.x_from >= args.x_to:
        raise CliError(2, "--from must be strictly below --to")
    if args.points < 2:
        raise CliError(2, "--points must be >= 2")
    law = LimitLaw(args.alpha)
    xs = np.linspace(args.x_from, args.x_to, args.points)
    dens = sym_density(xs, law)
    header = "x,density,cdf" if args.cdf else "x,density"
    print(header)
    for i, x in enumerate(xs):
        row = f"{_fmt(float(x))},{_fmt(float(dens[i]))}"
        if args.cdf:
            row += f",{_fmt(cdf(float(x), law))}"
        print(row)
    return 0


def _cmd_sample(args) -> int:
    _require(args, ["m", "n", "seed", "out"])
    if args.m < 1 or args.n < 1:
        raise CliError(2, "vertex counts must be >= 1")
    if args.model == "er":
        if args.p is None:
            raise CliError(2, "model 'er' needs --p")
        if not 0.0 <= args.p <= 1.0:
            raise CliError(2, f"edge probability must be in [0, 1], got {args.p}")
        g = sample_er(args.m, args.n, args.p, args.seed)
    else:
        if args.dl is None:
            raise CliError(2, "model 'regular' needs --dl")
        if args.dl < 0:
            raise CliError(2, "degree must be nonnegative")
        if (args.m * args.dl) % args.n:
            raise CliError(3, f"infeasible: m*dl={args.m * args.dl} not divisible by n={args.n}")
        spec = DegreeSpec(args.dl, (args.m * args.dl) // args.n)
        try:
            spec.validate_for(args.m, args.n)
        except ValueError as exc:
            raise CliError(3, f"infeasible: {exc}") from None
        g = sample_regular(args.m, args.n, spec, args.seed, args.mixing_steps)
    write_edge_list(g, args.out)
    print(f"{args.model} {g.m} {g.n} {g.edge_count} {args.seed}")
    return 0


def _cmd_spectrum(args) -> int:
    _require(args, ["in", "out"])
    g = read_edge_list(getattr(args, "in"))
    if args.normalize == "none":
        block = g.X.astype(float)
    elif args.normalize == "er":
        if args.p is None:
            raise CliError(2, "--normalize er needs --p")
        if not 0.0 < args.p < 1.0:
            raise CliError(2, f"need 0 < p < 1, got {args.p}")
        block = normalized_er(g, args.p).block
    else:  # regular
        if args.dl is None:
            raise CliError(2, "--normalize regular needs --dl")
        if (g.m * args.dl) % g.n:
            raise CliError(3, f"infeasible: m*dl={g.m * args.dl} not divisible by n={g.n}")
        spec = DegreeSpec(args.dl, (g.m * args.dl) // g.n)
        if not is_regular(g, spec):
            raise CliError(3, f"graph in {getattr(args, 'in')} is not ({spec.d_left}, "
                              f"{spec.d_right})-regular")
        block = normalized_regular(g, spec).block
    if args.scale == "none":
        scale = 1.0
    else:
        scale = 1.0 / math.sqrt(g.m if args.scale == "m" else g.n)
    s = bipartite_spectrum(block, scale=scale)
    write_spectrum_csv(s, args.out)
    if args.hist is not None:
        if args.hist < 1:
            raise CliError(2, "--hist needs at least one bin")
        counts, edges = np.histogram(s.scaled_values, bins=args.hist)
        hist_path = args.hist_out or str(Path(args.out).with_suffix(".hist.csv"))
        with open(hist_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("bin_lo,bin_hi,count\n")
            for k in range(args.hist):
                fh.write(f"{edges[k]:.17g},{edges[k + 1]:.17g},{counts[k]}\n")
    print(f"spectrum {g.m} {g.n} {s.size}")
    return 0


def _local_law_config(args) -> LocalLawConfig:
    _require(args, ["m", "n", "seed"])
    intervals = None
    if args.interval:
        intervals = tuple(Interval(lo, hi) for lo, hi in map(_parse_pair, args.interval))
    return LocalLawConfig(
        m=args.m,
        n=args.n,
        d_left=args.dl,
        p=args.p,
        delta=args.delta,
        trials=args.trials,
        seed=args.seed,
        intervals=intervals,
        n_intervals=args.intervals,
        interval_length=args.interval_length,
        bulk_margin=args.bulk_margin,
        count_basis=args.count_basis,
        scale_basis=args.scale_basis,
        mixing_steps=args.mixing_steps,
        threads=_resolve_threads(args.threads),
    )


def _cmd_local_law(args) -> int:
    cfg = _local_law_config(args)
    if args.model == "regular":
        if args.dl is None:
            raise CliError(2, "model 'regular' needs --dl")
        report = run_local_law_regular(cfg)
    else:
        if args.p is None:
            raise CliError(2, "model 'er' needs --p")
        report = run_local_law_er(cfg)
    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    report.write_json(out_dir / "report.json")
    report.write_csv(out_dir / "summary.csv")
    rate = report.aggregates["pass_rate"]
    print(f"pass_rate={'n/a' if rate is None else _fmt(rate)} "
          f"n_eval={report.aggregates['n_eval']} out={out_dir}")
    if rate is None or rate < args.pass_threshold:
        return 4
    return 0


def _cmd_factor_check(args) -> int:
    _require(args, ["in", "fa", "fb"])
    g = read_edge_list(getattr(args, "in"))
    fa = _parse_int_list(args.fa)
    fb = _parse_int_list(args.fb)
    if len(fa) != g.m or len(fb) != g.n:
        raise CliError(3, f"demand lengths ({len(fa)}, {len(fb)}) do not match "
                          f"graph ({g.m}, {g.n})")
    if any(v < 0 for v in fa + fb):
        raise CliError(2, "demands must be nonnegative")
    outcome = find_f_factor(g, FactorSpec(tuple(fa), tuple(fb)))
    payload = {"exists": outcome.factor is not None, "reason": outcome.reason}
    if outcome.factor is not None:
        payload["factor_edges"] = [[int(i), int(j)] for i, j in outcome.factor.edges()]
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("factor exists" if payload["exists"] else f"no factor ({outcome.reason})")
    if outcome.reason == "unbalanced":
        return 3
    return 0


def _cmd_regularity_prob(args) -> int:
    _require(args, ["m", "n", "p", "trials", "seed"])
    report = estimate_regularity_probability(args.m, args.n, args.p, args.trials, args.seed)
    agg = report.aggregates
    if not args.json:
        print(f"estimate={_fmt(agg['estimate'])} "
              f"ci95=[{_fmt(agg['ci95_low'])},{_fmt(agg['ci95_high'])}] "
              f"successes={agg['successes']}/{report.config['trials']}")
    _emit_report(report, args)
    return 0


def _cmd_factor_freq(args) -> int:
    _require(args, ["m", "n", "p", "trials", "seed"])
    report = regular_factor_frequency(
        args.m, args.n, args.p, args.delta_param, args.trials, args.seed,
        threads=_resolve_threads(args.threads),
    )
    agg = report.aggregates
    if not args.json:
        print(f"frequency={_fmt(agg['frequency'])} "
              f"ci95=[{_fmt(agg['ci95_low'])},{_fmt(agg['ci95_high'])}] "
              f"demands=({report.config['d_left_factor']},{report.config['d_right_factor']})")
    _emit_report(report, args)
    return 0


def _cmd_concentration(args) -> int:
    _require(args, ["m", "n", "p", "window", "t-grid", "trials", "seed"])
    lo, hi = _parse_pair(args.window)
    try:
        pair = window_pair(Interval(lo, hi), args.window_ratio, args.window_kind)
    except ValueError as exc:
        raise CliError(2, str(exc)) from None
    f = pair.outer if args.component == "outer" else pair.inner
    report = concentration_tail_check(
        args.m, args.n, args.p, f, pair.slope, _parse_float_list(args.t_grid),
        args.trials, args.seed, threads=_resolve_threads(args.threads),
        c_reference=args.c_reference,
    )
    if not args.json:
        print("T,tail,fitted_c")
        for row in report.aggregates["tails"]:
            fit = "" if row["fitted_c"] is None else _fmt(row["fitted_c"])
            print(f"{_fmt(row['T'])},{_fmt(row['tail'])},{fit}")
    _emit_report(report, args)
    return 0


def _cmd_rate_sweep(args) -> int:
    _require(args, ["n-list", "alpha", "p", "trials", "seed"])
    sizes = _parse_int_list(args.n_list)
    if args.interval is not None:
        lo, hi = _parse_pair(args.interval)
        interval = Interval(lo, hi)
    else:
        law = LimitLaw(args.alpha)
        width = law.b - law.a
        interval = Interval(law.a + 0.25 * width, law.b - 0.25 * width)
    report = convergence_rate_sweep(
        sizes, args.alpha, args.p, interval, args.trials, args.seed,
        threads=_resolve_threads(args.threads),
    )
    if not args.json:
        print("n,mean_count,predicted,rel_dev")
        for row in report.trials:
            rel = "" if row["rel_dev"] is None else _fmt(row["rel_dev"])
            print(f"{row['n']},{_fmt(row['mean_count'])},{_fmt(row['predicted'])},{rel}")
        gamma = report.aggregates["gamma"]
        print(f"gamma={'n/a' if gamma is None else _fmt(gamma)}")
    _emit_report(report, args)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common_experiment_flags(sp) -> None:
    sp.add_argument("--seed", type=int, default=None, help="master seed (required)")
    sp.add_argument("--threads", default=None,
                    help=f"worker processes, 0 = all cores (env {THREADS_ENV})")
    sp.add_argument("--json", action="store_true", help="print the full JSON report")
    sp.add_argument("--out", default=None, help="write the JSON report to this path")
    sp.add_argument("--config", default=None,
                    help="JSON file of defaults; explicit flags override")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bipspec",
        description="Random bipartite graph spectra vs the Marchenko-Pastur limit law",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")
    subs = {}

    sp = sub.add_parser("mp-eval", help="evaluate the symmetrized limit density")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--from", dest="x_from", type=float, required=True)
    sp.add_argument("--to", dest="x_to", type=float, required=True)
    sp.add_argument("--points", type=int, required=True)
    sp.add_argument("--cdf", action="store_true", help="append a cdf column")
    subs["mp-eval"] = sp

    sp = sub.add_parser("sample", help="sample a graph and write its edge list")
    sp.add_argument("--model", choices=("er", "regular"), required=True)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--dl", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--mixing-steps", type=int, default=None)
    sp.add_argument("--out", default=None)
    subs["sample"] = sp

    sp = sub.add_parser("spectrum", help="eigenvalues of a stored graph")
    sp.add_argument("--in", dest="in", default=None, metavar="PATH")
    sp.add_argument("--normalize", choices=("regular", "er", "none"), default="none")
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--dl", type=int, default=None)
    sp.add_argument("--scale", choices=("m", "n", "none"), default="none")
    sp.add_argument("--hist", type=int, default=None, metavar="B")
    sp.add_argument("--hist-out", default=None)
    sp.add_argument("--out", default=None)
    subs["spectrum"] = sp

    sp = sub.add_parser("local-law", help="eigenvalue counts on short intervals")
    sp.add_argument("--model", choices=("er", "regular"), required=True)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--dl", type=int, default=None)
    sp.add_argument("--delta", type=float, default=0.15)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--intervals", type=int, default=8, help="grid size (even)")
    sp.add_argument("--interval-length", type=float, default=None)
    sp.add_argument("--interval", action="append", default=None, metavar="LO,HI",
                    help="explicit interval, repeatable (overrides the grid)")
    sp.add_argument("--bulk-margin", type=float, default=0.1)
    sp.add_argument("--count-basis", choices=("m+n", "n"), default="m+n")
    sp.add_argument("--scale-basis", choices=("m", "n"), default="m")
    sp.add_argument("--mixing-steps", type=int, default=None)
    sp.add_argument("--pass-threshold", type=float, default=0.95)
    _add_common_experiment_flags(sp)
    subs["local-law"] = sp

    sp = sub.add_parser("factor-check", help="degree-constrained subgraph existence")
    sp.add_argument("--in", dest="in", default=None, metavar="PATH")
    sp.add_argument("--fa", default=None, help="left demands, comma separated")
    sp.add_argument("--fb", default=None, help="right demands, comma separated")
    sp.add_argument("--json", action="store_true")
    subs["factor-check"] = sp

    sp = sub.add_parser("regularity-prob", help="P(independent-edge graph is regular)")
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--trials", type=int, default=None)
    _add_common_experiment_flags(sp)
    subs["regularity-prob"] = sp

    sp = sub.add_parser("factor-freq", help="frequency of shaved regular factors")
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--delta-param", type=float, default=0.1)
    sp.add_argument("--trials", type=int, default=None)
    _add_common_experiment_flags(sp)
    subs["factor-freq"] = sp

    sp = sub.add_parser("concentration", help="trace-statistic tail table")
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--window", default=None, metavar="LO,HI")
    sp.add_argument("--window-ratio", type=float, default=4.0)
    sp.add_argument("--window-kind", choices=("upper", "lower"), default="upper")
    sp.add_argument("--component", choices=("outer", "inner"), default="outer")
    sp.add_argument("--t-grid", dest="t_grid", default=None)
    sp.add_argument("--c-reference", type=float, default=None)
    sp.add_argument("--trials", type=int, default=None)
    _add_common_experiment_flags(sp)
    subs["concentration"] = sp

    sp = sub.add_parser("rate-sweep", help="mean-count deviation vs size")
    sp.add_argument("--n-list", dest="n_list", default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--interval", default=None, metavar="LO,HI")
    sp.add_argument("--trials", type=int, default=None)
    _add_common_experiment_flags(sp)
    subs["rate-sweep"] = sp

    return parser, subs


_HANDLERS = {
    "mp-eval": _cmd_mp_eval,
    "sample": _cmd_sample,
    "spectrum": _cmd_spectrum,
    "local-law": _cmd_local_law,
    "factor-check": _cmd_factor_check,
    "regularity-prob": _cmd_regularity_prob,
    "factor-freq": _cmd_factor_freq,
    "concentration": _cmd_concentration,
    "rate-sweep": _cmd_rate_sweep,
}


def main(argv=None) -> int:
    parser, subs = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            try:
                with open(args.config, "r", encoding="utf-8") as fh:
                    defaults = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                print(f"bipspec: cannot read config: {exc}", file=sys.stderr)
                return 2
            sp = subs[args.command]
            valid = {action.dest for action in sp._actions}
            unknown = set(defaults) - valid
            if unknown:
                print(f"bipspec: unknown config keys: {sorted(unknown)}", file=sys.stderr)
                return 2
            sp.set_defaults(**defaults)
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return _HANDLERS[args.command](args)
    except CliError as exc:
        print(f"bipspec: {exc}", file=sys.stderr)
        return exc.code
    except (InfeasibleConfigError, EdgeListFormatError) as exc:
        print(f"bipspec: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"bipspec: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"bipspec: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
