"""Command-line interface: run, sweep, list-scenarios, check.

Exit codes: 0 success, 1 failed checks or unexpected error, 2 configuration
error, 3 solver failure, 4 monitor violation under --strict-monitors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError, SolverError
from .runner import run_scenario, sweep, write_sweep_csv
from .scenarios import BUILTIN_SCENARIOS, builtin_scenario, load_config

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_MONITOR = 4


def _scenario_from_args(args) -> "Scenario":
    if args.config and args.scenario:
        raise ConfigError("give either --scenario or --config, not both")
    if args.config:
        sc = load_config(Path(args.config))
    elif args.scenario:
        sc = builtin_scenario(args.scenario)
    else:
        raise ConfigError("one of --scenario or --config is required")
    overrides = {}
    if args.n_cells is not None:
        overrides["n_cells"] = args.n_cells
    if args.dt is not None:
        overrides["dt"] = None if args.dt == "auto" else float(args.dt)
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    if overrides:
        sc = replace(sc, **overrides)
    return sc


def _cmd_run(args) -> int:
    sc = _scenario_from_args(args)
    out = Path(args.out)
    report = run_scenario(sc, out_dir=out, figures=not args.no_figures)
    print(f"scenario {sc.name}: wrote {len(report.outputs)} files to {out}")
    print(f"  R0 = {report.dq.R0:.6g}, tau0 = {report.dq.tau0:.6g}, "
          f"E0 {report.stability.e0_verdict}, E* {report.stability.estar_verdict}")
    for key, val in report.monitor_verdicts.items():
        print(f"  {key} = {val}")
    if args.strict_monitors and not all(report.monitor_verdicts.values()):
        print("monitor violation (strict mode)", file=sys.stderr)
        return EXIT_MONITOR
    return EXIT_OK


def _cmd_sweep(args) -> int:
    sc = _scenario_from_args(args)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values must list at least one number")
    rows = sweep(sc, args.param, values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = write_sweep_csv(rows, out / "sweep.csv")
    print(f"swept {args.param} over {len(values)} values -> {path}")
    for r in rows:
        print(f"  {args.param} = {r['value']:g}: R0 = {r['R0']:.6g}, "
              f"E* exists = {r['Estar_exists']}")
    return EXIT_OK


def _cmd_list_scenarios(args) -> int:
    for name, sc in sorted(BUILTIN_SCENARIOS.items()):
        print(f"{name}: t_end = {sc.t_end:g}, n_cells = {sc.n_cells}, "
              f"mu = {sc.params.mu:g}, u = {sc.params.u}")
    return EXIT_OK


def _cmd_check(args) -> int:
    from .checks import run_all

    results = run_all(fast=args.fast)
    failed = 0
    for r in results:
        status = "ok" if r.ok else "FAIL"
        print(f"[{status}] {r.name}: {r.detail}")
        failed += 0 if r.ok else 1
    if failed:
        print(f"{failed} of {len(results)} checks failed", file=sys.stderr)
        return EXIT_FAIL
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcvrd",
        description="Simulate and analyze a reaction-diffusion within-host HCV model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_args(sp):
        sp.add_argument("--scenario", help="built-in scenario name")
        sp.add_argument("--config", help="path to a key=value scenario file")
        sp.add_argument("--n-cells", type=int, dest="n_cells")
        sp.add_argument("--dt", help="time step, a number or 'auto'")
        sp.add_argument("--t-end", type=float, dest="t_end")

    run_p = sub.add_parser("run", help="integrate a scenario and write reports")
    add_scenario_args(run_p)
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")
    run_p.add_argument("--strict-monitors", action="store_true",
                       help="exit nonzero if any monitor verdict fails")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="threshold analysis across one parameter")
    add_scenario_args(sweep_p)
    sweep_p.add_argument("--param", required=True, help="parameter key to vary")
    sweep_p.add_argument("--values", required=True, help="comma-separated values")
    sweep_p.add_argument("--out", default="out", help="output directory")
    sweep_p.set_defaults(func=_cmd_sweep)

    list_p = sub.add_parser("list-scenarios", help="list built-in scenarios")
    list_p.set_defaults(func=_cmd_list_scenarios)

    check_p = sub.add_parser("check", help="run the invariant self-checks")
    check_p.add_argument("--fast", action="store_true", help="smaller sample sizes")
    check_p.set_defaults(func=_cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
