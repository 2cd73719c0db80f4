"""Command-line interface.

Subcommands:

* ``simulate``   integrate a calibration with no lockdown and write reports
* ``optimize``   run the forward-backward sweep and write reports
* ``compare``    run both scenarios (or load two summary files) and print ratios
* ``calibrate``  print or export a built-in calibration as a config file

Exit codes: 0 success, 1 usage error, 2 solver non-convergence, 3 I/O
error.  Errors print one machine-parsable line to stderr of the form
``error kind=<usage|solver|io> detail=<message>``.  The environment
variable ``LOCKDOWN_OPT_OUT`` overrides the output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import charts, output
from .calibration import (
    BUILTIN_CALIBRATIONS,
    Calibration,
    builtin_calibration,
    calibration_to_sections,
    load_calibration,
)
from .configfile import format_sections, write_sections
from .control import SolverConfig
from .costs import CostShape
from .dynamics import TimeGrid
from .errors import LockdownOptError, NonConvergenceError
from .scenarios import ScenarioReport, compare, run_controlled, run_uncontrolled

__all__ = ["main", "entry", "RunConfig"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want exit code 1
        raise _UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated CLI settings for one scenario run."""

    calibration: Calibration
    scenarios: tuple[str, ...]
    grid: TimeGrid
    solver: SolverConfig
    outdir: Path
    write_charts: bool


def _money(value: float) -> str:
    return f"{value:.4e}"


def _build_parser() -> _Parser:
    parser = _Parser(prog="lockdown-opt", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, calib_required=True):
        p.add_argument(
            "--calib",
            required=calib_required,
            help=f"builtin calibration ({', '.join(sorted(BUILTIN_CALIBRATIONS))}) "
            "or a config file path",
        )
        p.add_argument("--horizon", type=float, default=365.0, help="days (default 365)")
        p.add_argument("--step", type=float, default=0.1, help="grid step in days")
        p.add_argument("--outdir", default="out", help="output directory")
        p.add_argument("--no-charts", action="store_true", help="skip SVG output")
        p.add_argument(
            "--cost-shape",
            choices=[s.value for s in CostShape],
            default=None,
            help="override the quarantine cost shape",
        )
        p.add_argument(
            "--u-max",
            default=None,
            help="override the admissible lockdown cap (scalar or comma list)",
        )

    sim = sub.add_parser("simulate", help="uncontrolled baseline run")
    add_common(sim)

    opt = sub.add_parser("optimize", help="forward-backward sweep run")
    add_common(opt)
    opt.add_argument("--omega", type=float, default=0.5, help="sweep relaxation in (0, 1]")
    opt.add_argument("--tolerance", type=float, default=1e-6, help="sup-norm tolerance")
    opt.add_argument("--max-iterations", type=int, default=500)
    opt.add_argument(
        "--paper-decoupled-adjoint",
        action="store_true",
        help="use the own-group-only costate coupling for comparison runs",
    )

    cmp_parser = sub.add_parser(
        "compare", help="compare two runs (fresh or from summary files)"
    )
    cmp_parser.add_argument("--a", dest="summary_a", help="first summary JSON")
    cmp_parser.add_argument("--b", dest="summary_b", help="second summary JSON")
    add_common(cmp_parser, calib_required=False)  # not needed with --a/--b
    cmp_parser.add_argument("--omega", type=float, default=0.5)
    cmp_parser.add_argument("--tolerance", type=float, default=1e-6)
    cmp_parser.add_argument("--max-iterations", type=int, default=500)
    cmp_parser.add_argument("--paper-decoupled-adjoint", action="store_true")

    cal = sub.add_parser("calibrate", help="print or export builtin calibrations")
    cal.add_argument("--calib", required=True, help="builtin calibration name")
    cal.add_argument("--out", default=None, help="write the config file here")
    return parser


def _load_calibration(source: str) -> Calibration:
    if source in BUILTIN_CALIBRATIONS:
        return builtin_calibration(source)
    path = Path(source)
    if not path.exists():
        raise _UsageError(f"unknown calibration {source!r} (not builtin, not a file)")
    return load_calibration(path)


def _apply_overrides(calibration: Calibration, args) -> Calibration:
    cost = calibration.cost
    params = calibration.params
    if args.cost_shape is not None:
        cost = replace(cost, shape=CostShape(args.cost_shape))
    if args.u_max is not None:
        values = [float(v) for v in str(args.u_max).split(",")]
        u_max = np.full(params.n_groups, values[0]) if len(values) == 1 else np.asarray(values)
        params = replace(params, u_max=u_max)
    if cost is calibration.cost and params is calibration.params:
        return calibration
    return Calibration(
        calibration.name, params, cost, calibration.initial, calibration.targets
    )


def _run_config(args, scenarios: tuple[str, ...]) -> RunConfig:
    calibration = _apply_overrides(_load_calibration(args.calib), args)
    grid = TimeGrid(horizon=args.horizon, step=args.step)
    if "controlled" in scenarios:
        solver = SolverConfig(
            grid=grid,
            max_iterations=args.max_iterations,
            relaxation=args.omega,
            tolerance=args.tolerance,
            paper_decoupled_adjoint=args.paper_decoupled_adjoint,
        )
    else:
        solver = SolverConfig(grid=grid)
    outdir = Path(os.environ.get("LOCKDOWN_OPT_OUT", args.outdir))
    return RunConfig(
        calibration=calibration,
        scenarios=scenarios,
        grid=grid,
        solver=solver,
        outdir=outdir,
        write_charts=not args.no_charts,
    )


def _write_outputs(report: ScenarioReport, config: RunConfig) -> None:
    config.outdir.mkdir(parents=True, exist_ok=True)
    stem = f"{report.calibration}-{report.scenario}"
    csv_path = config.outdir / f"{stem}.csv"
    json_path = config.outdir / f"{stem}.json"
    output.write_timeseries_csv(report, csv_path)
    output.write_summary_json(report, json_path)
    written = [csv_path, json_path]
    if config.write_charts:
        svg_path = config.outdir / f"{stem}.svg"
        charts.write_chart_svg(
            report, svg_path, config.calibration.cost, config.calibration.params
        )
        written.append(svg_path)
    print(f"scenario={report.scenario} calib={report.calibration} J={_money(report.objective)}")
    peak = report.peak_total_infectious
    print(f"peak_infectious_persons={peak.persons:.1f} peak_day={peak.day:g}")
    for path in written:
        print(f"wrote {path}")


def _cmd_simulate(args) -> int:
    config = _run_config(args, ("uncontrolled",))
    report = run_uncontrolled(config.calibration, config.grid)
    _write_outputs(report, config)
    return 0


def _cmd_optimize(args) -> int:
    config = _run_config(args, ("controlled",))
    report = run_controlled(config.calibration, config.solver)
    _write_outputs(report, config)
    print(f"iterations={report.iterations}")
    if report.structure is not None:
        t0 = ",".join(f"{v:g}" for v in report.structure.t_full_end)
        t1 = ",".join(f"{v:g}" for v in report.structure.t_zero_start)
        print(f"t_full_end={t0} t_zero_start={t1}")
    return 0


def _cmd_compare(args) -> int:
    if (args.summary_a is None) != (args.summary_b is None):
        raise _UsageError("compare needs both --a and --b, or neither")
    if args.summary_a is not None:
        report_a = output.load_summary(args.summary_a)
        report_b = output.load_summary(args.summary_b)
    else:
        if args.calib is None:
            raise _UsageError("compare needs --calib when --a/--b are not given")
        config = _run_config(args, ("uncontrolled", "controlled"))
        report_a = run_uncontrolled(config.calibration, config.grid)
        report_b = run_controlled(config.calibration, config.solver)
        _write_outputs(report_a, config)
        _write_outputs(report_b, config)
    result = compare([report_a, report_b])
    b_over_a = result.pairs[1]  # ordered pairs: [0] = (a, b), [1] = (b, a)
    print(f"J_a={_money(report_a.objective)} ({b_over_a.scenario_b})")
    print(f"J_b={_money(report_b.objective)} ({b_over_a.scenario_a})")
    print(f"J_ratio={b_over_a.objective_ratio:.4f}")
    print(f"peak_day_shift={b_over_a.peak_day_shift:g}")
    print(
        f"final_quarantined_share_a={b_over_a.final_quarantined_share_b:.4f} "
        f"final_quarantined_share_b={b_over_a.final_quarantined_share_a:.4f}"
    )
    return 0


def _cmd_calibrate(args) -> int:
    if args.calib not in BUILTIN_CALIBRATIONS:
        raise _UsageError(
            f"unknown calibration {args.calib!r}; "
            f"available: {', '.join(sorted(BUILTIN_CALIBRATIONS))}"
        )
    calibration = builtin_calibration(args.calib)
    sections = calibration_to_sections(calibration)
    if args.out is None:
        sys.stdout.write(format_sections(sections))
    else:
        path = Path(args.out)
        if path.parent != Path("."):
            path.parent.mkdir(parents=True, exist_ok=True)
        write_sections(sections, path)
        print(f"wrote {path}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "optimize": _cmd_optimize,
    "compare": _cmd_compare,
    "calibrate": _cmd_calibrate,
}


def _fail(kind: str, detail: str) -> None:
    detail = " ".join(str(detail).split())
    print(f"error kind={kind} detail={detail}", file=sys.stderr)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _fail("usage", str(exc))
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        _fail("usage", str(exc))
        return 1
    except NonConvergenceError as exc:
        _fail("solver", str(exc))
        return 2
    except OSError as exc:
        _fail("io", str(exc))
        return 3
    except (LockdownOptError, ValueError) as exc:
        _fail("usage", str(exc))
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
