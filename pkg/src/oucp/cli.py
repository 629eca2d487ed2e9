"""Command-line front end.

Exit codes: 0 success, 2 infeasible configuration or bad arguments,
3 data errors, 4 singular segment statistics or failed Monte-Carlo runs.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from collections.abc import Sequence
from pathlib import Path

from . import __version__
from .errors import DataError, OUCPError
from .io import ingest_csv, to_json_text, write_json, write_series_csv, write_table_csv
from .pipeline import PipelineConfig, full_pipeline
from .simulate import RegimeScenario, study_basis, study_scenario, simulate


def _sigma_arg(text: str) -> float | str:
    if text == "realized":
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number or 'realized'") from None
    if value < 0:
        raise argparse.ArgumentTypeError("sigma must be non-negative")
    return value


def _fractions_arg(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated fractions") from None


def _add_scenario_args(p: argparse.ArgumentParser, sigma_default: float = 0.2) -> None:
    p.add_argument("--case", type=int, choices=(1, 2), default=1,
                   help="coefficient set: 1 constant basis, 2 adds the cosine term")
    p.add_argument("--m", type=int, choices=(2, 3), default=2,
                   help="number of change points in the scenario")
    p.add_argument("--fractions", type=_fractions_arg, default=None,
                   help="override the change fractions, e.g. 0.3,0.6 (length must match --m)")
    p.add_argument("--T", type=float, default=10.0, help="time horizon")
    p.add_argument("--dt", type=float, default=None, help="step size (default T/1000)")
    p.add_argument("--sigma", type=float, default=sigma_default, help="diffusion coefficient")
    p.add_argument("--x0", type=float, default=None,
                   help="initial value (default: first regime's long-run level)")


def _scenario(args: argparse.Namespace) -> RegimeScenario:
    sc = study_scenario(args.case, args.m, args.T, args.dt, args.sigma, args.x0)
    if args.fractions is not None:
        if len(args.fractions) != sc.m:
            raise DataError(f"--fractions needs {sc.m} values for --m {sc.m}")
        sc = RegimeScenario(sc.regimes, args.fractions, sc.sigma, sc.T, sc.delta_t, sc.x0)
    return sc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oucp",
        description="Offline change-point detection for generalised OU processes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a regime-switching path to CSV")
    _add_scenario_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV (t,x); metadata goes to <out>.json")

    p = sub.add_parser("detect", help="detect change points in a CSV series")
    p.add_argument("input", help="CSV file with a header row")
    p.add_argument("--time-column", default="t", help="name of the time column ('' for none)")
    p.add_argument("--value-column", default="x")
    p.add_argument("--dt", type=float, required=True, help="sampling step of the series")
    p.add_argument("--log-transform", action="store_true", help="take natural logs first")
    p.add_argument("--basis", choices=("constant", "case2", "fourier"), default="constant")
    p.add_argument("--period", type=float, default=1.0, help="fourier basis period")
    p.add_argument("--harmonics", type=int, default=1, help="fourier basis harmonics")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--m", type=int, help="known number of change points")
    mode.add_argument("--auto", choices=("sns", "pelt"), help="estimate the number too")
    p.add_argument("--mmax", type=int, default=10, help="largest m tried by SNS")
    h = p.add_mutually_exclusive_group()
    h.add_argument("--h-frac", type=float, default=0.05, help="minimum regime length, fraction of n")
    h.add_argument("--h-abs", type=int, default=None, help="minimum regime length in rows")
    p.add_argument("--sigma", type=_sigma_arg, default="realized",
                   help="diffusion coefficient or 'realized'")
    p.add_argument("--objective", choices=("lsse", "mll"), default="mll")
    p.add_argument("--penalty", choices=("sic", "aic"), default="sic")
    p.add_argument("--out", default=None, help="result JSON (default: stdout)")
    p.add_argument("--plots", default=None, help="directory for figures")
    p.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)

    for name, helptext in (("mc-rates", "Monte-Carlo change-point location study"),
                           ("mc-count", "Monte-Carlo number-of-change-points study")):
        p = sub.add_parser(name, help=helptext)
        _add_scenario_args(p)
        p.add_argument("--iterations", type=int, default=500)
        p.add_argument("--seed", type=int, default=0, help="first seed; iteration i uses seed+i")
        p.add_argument("--h-frac", type=float, default=0.05)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", required=True, help="CSV table; config goes to <out>.json")
        p.add_argument("--plots", default=None, help="directory for histograms")
        if name == "mc-rates":
            p.add_argument("--methods", default="lsse,mll", help="comma-separated lsse,mll")
        else:
            p.add_argument("--auto", choices=("sns", "pelt"), default="sns")
            p.add_argument("--mmax", type=int, default=5)

    p = sub.add_parser("plot", help="plot a CSV series with the change points of a result")
    p.add_argument("input")
    p.add_argument("--result", default=None, help="detection result JSON")
    p.add_argument("--value-column", default="x")
    p.add_argument("--time-column", default="t")
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--log-transform", action="store_true")
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _sidecar(path: str) -> Path:
    return Path(str(path) + ".json")


def cmd_simulate(args: argparse.Namespace) -> int:
    sc = _scenario(args)
    basis = study_basis(args.case, sc.delta_t)
    series = simulate(sc, basis, args.seed)
    write_series_csv(series, args.out)
    meta = {**series.metadata, "case": args.case, "T": sc.T, "delta_t": sc.delta_t,
            "change_fractions": list(sc.change_fractions),
            "regimes": [{"mu": list(r.mu), "a": r.a} for r in sc.regimes]}
    write_json(meta, _sidecar(args.out))
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    series = ingest_csv(args.input, args.time_column or None, args.value_column,
                        args.log_transform, args.dt)
    config = PipelineConfig(
        algorithm="dp" if args.m is not None else args.auto,
        basis=args.basis, period=args.period, harmonics=args.harmonics,
        m=args.m, m_max=args.mmax, h_frac=args.h_frac, h_abs=args.h_abs,
        sigma=args.sigma, objective=args.objective, penalty=args.penalty,
        out_json=args.out, plot_dir=args.plots,
    )
    result = full_pipeline(series, config)
    if args.oracle:
        from .dp import Objective
        from .oracle import exhaustive_search

        basis = config.make_basis(series)
        objective = Objective(args.objective,
                              result.sigma_used if args.objective == "mll" else None)
        if result.m == 0:
            print("oracle: nothing to check for m = 0", file=sys.stderr)
        else:
            seg, cost = exhaustive_search(series, basis, result.m, args.h_frac,
                                          objective, args.h_abs)
            same = list(seg.change_indices) == result.change_indices
            print(f"oracle: {list(seg.change_indices)} cost {cost!r} "
                  f"({'agrees' if same else 'DISAGREES'})", file=sys.stderr)
            if not same:
                return 1
    if not args.out:
        print(to_json_text(result.to_dict()))
    return 0


def cmd_mc(args: argparse.Namespace) -> int:
    from .montecarlo import run_count_experiment, run_rate_experiments

    sc = _scenario(args)
    basis = study_basis(args.case, sc.delta_t)
    config = {
        "command": args.command, "case": args.case, "m": sc.m, "T": sc.T,
        "delta_t": sc.delta_t, "sigma": sc.sigma, "x0": sc.initial_value,
        "change_fractions": list(sc.change_fractions), "iterations": args.iterations,
        "seed0": args.seed, "seeds": [args.seed, args.seed + args.iterations - 1],
        "generator": "numpy.random.PCG64", "h_frac": args.h_frac,
    }
    if args.command == "mc-rates":
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
        summaries = run_rate_experiments(sc, basis, methods, args.iterations, args.seed,
                                         args.h_frac, workers=args.workers)
        rows = [row for s in summaries.values() for row in s.rows()]
        config["methods"] = list(methods)
        config["errors"] = next(iter(summaries.values())).errors
        if args.plots:
            from .plots import plot_rate_histograms

            for s in summaries.values():
                plot_rate_histograms(s, args.plots)
    else:
        label = f"case {args.case}, T={sc.T:g}"
        summary = run_count_experiment(sc, basis, args.auto, args.mmax, args.iterations,
                                       args.seed, args.h_frac, workers=args.workers,
                                       label=label)
        rows = summary.rows()
        config.update(algorithm=args.auto, m_max=args.mmax, m_hat=summary.m_hat,
                      errors=summary.errors)
    write_table_csv(rows, args.out)
    write_json(config, _sidecar(args.out))
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    import json

    from .plots import plot_series
    from .results import DetectionResult

    series = ingest_csv(args.input, args.time_column or None, args.value_column,
                        args.log_transform, args.dt)
    result = None
    if args.result:
        try:
            data = json.loads(Path(args.result).read_text())
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read result {args.result}: {exc}") from exc
        result = DetectionResult(
            method=data["method"], algorithm=data["algorithm"], m=data["m"],
            change_indices=data["change_indices"], change_times=data["change_times"],
            change_fractions=data["change_fractions"], per_segment=[],
            sigma_used=data.get("sigma_used"), total_cost=data["total_cost"],
            n=data["n"], delta_t=data["delta_t"],
        )
    print(plot_series(series, result, args.out))
    return 0


COMMANDS = {"simulate": cmd_simulate, "detect": cmd_detect, "mc-rates": cmd_mc,
            "mc-count": cmd_mc, "plot": cmd_plot}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except OUCPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
