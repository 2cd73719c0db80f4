"""File output: trajectory CSV and JSON run summaries.

The CSV carries one row per (grid node, group) with full-precision
shortest round-trip decimals, UNIX line endings, UTF-8; parsing it back
reproduces the trajectory bit-exactly.  The JSON summary holds the
headline numbers (objective, peaks, finals, switching structure) so two
runs can be compared without re-simulation.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import Compartment
from .scenarios import PeakStat, ScenarioReport

__all__ = [
    "write_timeseries_csv",
    "read_timeseries_csv",
    "write_summary_json",
    "load_summary",
    "SummaryView",
]

CSV_HEADER = ["t", "group", "S", "Q", "A", "I", "R", "D", "u"]


def write_timeseries_csv(report: ScenarioReport, path) -> None:
    """One row per (node, group): ``t,group,S,Q,A,I,R,D,u``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    times = report.grid.nodes()
    for m, t in enumerate(times):
        state = report.trajectory[m]
        for g, name in enumerate(report.group_names):
            writer.writerow(
                [repr(float(t)), name]
                + [repr(float(state[comp, g])) for comp in Compartment]
                + [repr(float(report.schedule[m, g]))]
            )
    Path(path).write_text(buffer.getvalue(), encoding="utf-8", newline="\n")


def read_timeseries_csv(path):
    """Parse a trajectory CSV back into ``(times, group_names, trajectory,
    schedule)`` arrays."""
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path}")
    body = rows[1:]
    group_names: list[str] = []
    for row in body:
        if row[1] in group_names:
            break
        group_names.append(row[1])
    n_groups = len(group_names)
    n_nodes = len(body) // n_groups
    times = np.array([float(body[m * n_groups][0]) for m in range(n_nodes)])
    trajectory = np.empty((n_nodes, len(Compartment), n_groups))
    schedule = np.empty((n_nodes, n_groups))
    for m in range(n_nodes):
        for g in range(n_groups):
            row = body[m * n_groups + g]
            trajectory[m, :, g] = [float(v) for v in row[2:8]]
            schedule[m, g] = float(row[8])
    return times, tuple(group_names), trajectory, schedule


def _peak_dict(peak: PeakStat) -> dict:
    return {"fraction": peak.fraction, "persons": peak.persons, "day": peak.day}


def write_summary_json(report: ScenarioReport, path) -> None:
    summary = {
        "scenario": report.scenario,
        "calibration": report.calibration,
        "groups": list(report.group_names),
        "grid": {"horizon": report.grid.horizon, "step": report.grid.step},
        "population": report.population,
        "objective": report.objective,
        "iterations": report.iterations,
        "converged": report.converged,
        "peaks": {
            comp: [_peak_dict(p) for p in stats] for comp, stats in report.peaks.items()
        },
        "peak_total_infectious": _peak_dict(report.peak_total_infectious),
        "final_persons": {
            comp.name: [float(v) for v in report.final_persons[comp]]
            for comp in Compartment
        },
        "final_quarantined_persons": report.final_quarantined_persons,
    }
    if report.structure is not None:
        summary["structure"] = {
            "t_full_end": [float(v) for v in report.structure.t_full_end],
            "t_zero_start": [float(v) for v in report.structure.t_zero_start],
        }
    Path(path).write_text(
        json.dumps(summary, indent=2) + "\n", encoding="utf-8", newline="\n"
    )


@dataclass(frozen=True)
class SummaryView:
    """The slice of a run summary that comparisons need; attribute-compatible
    with :class:`ScenarioReport` for :func:`lockdown_opt.scenarios.compare`."""

    scenario: str
    calibration: str
    population: float
    objective: float
    peak_total_infectious: PeakStat
    final_quarantined_persons: float

    @property
    def final_quarantined_share(self) -> float:
        return self.final_quarantined_persons / self.population


def load_summary(path) -> SummaryView:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    peak = data["peak_total_infectious"]
    return SummaryView(
        scenario=data["scenario"],
        calibration=data["calibration"],
        population=float(data["population"]),
        objective=float(data["objective"]),
        peak_total_infectious=PeakStat(
            fraction=float(peak["fraction"]),
            persons=float(peak["persons"]),
            day=float(peak["day"]),
        ),
        final_quarantined_persons=float(data["final_quarantined_persons"]),
    )
