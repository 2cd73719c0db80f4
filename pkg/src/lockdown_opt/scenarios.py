"""Experiment orchestration: baseline runs, optimal-control runs, comparisons."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibration import Calibration
from .control import PolicyStructure, SolverConfig, solve_fbsm
from .costs import objective
from .dynamics import Compartment, TimeGrid, integrate_forward, zero_schedule

__all__ = [
    "PeakStat",
    "ScenarioReport",
    "PairComparison",
    "ComparisonReport",
    "run_uncontrolled",
    "run_controlled",
    "compare",
]


@dataclass(frozen=True)
class PeakStat:
    """Maximum of one series: fraction, persons, and the first day attaining it."""

    fraction: float
    persons: float
    day: float


@dataclass
class ScenarioReport:
    """One scenario run, with peaks and finals recomputable from the
    stored trajectory."""

    scenario: str
    calibration: str
    group_names: tuple[str, ...]
    grid: TimeGrid
    population: float
    trajectory: np.ndarray
    schedule: np.ndarray
    objective: float
    peaks: dict[str, list[PeakStat]]
    peak_total_infectious: PeakStat
    final_persons: np.ndarray
    structure: PolicyStructure | None = None
    iterations: int = 0
    converged: bool = True

    @property
    def final_quarantined_persons(self) -> float:
        return float(self.final_persons[Compartment.Q].sum())

    @property
    def final_quarantined_share(self) -> float:
        return self.final_quarantined_persons / self.population


def _peak(series: np.ndarray, times: np.ndarray, population: float) -> PeakStat:
    idx = int(np.argmax(series))  # argmax returns the first maximiser
    return PeakStat(
        fraction=float(series[idx]),
        persons=float(series[idx] * population),
        day=float(times[idx]),
    )


def _build_report(scenario, calibration, grid, trajectory, schedule,
                  j_value, structure, iterations, converged) -> ScenarioReport:
    params = calibration.params
    times = grid.nodes()
    peaks = {
        comp.name: [
            _peak(trajectory[:, comp, g], times, params.population)
            for g in range(params.n_groups)
        ]
        for comp in (Compartment.A, Compartment.I, Compartment.D)
    }
    total_infectious = trajectory[:, Compartment.A, :].sum(axis=1) + trajectory[
        :, Compartment.I, :
    ].sum(axis=1)
    return ScenarioReport(
        scenario=scenario,
        calibration=calibration.name,
        group_names=params.group_names,
        grid=grid,
        population=params.population,
        trajectory=trajectory,
        schedule=schedule,
        objective=j_value,
        peaks=peaks,
        peak_total_infectious=_peak(total_infectious, times, params.population),
        final_persons=trajectory[-1] * params.population,
        structure=structure,
        iterations=iterations,
        converged=converged,
    )


def run_uncontrolled(calibration: Calibration, grid: TimeGrid | None = None) -> ScenarioReport:
    """Integrate the epidemic with no lockdown and price the outcome."""
    grid = grid or TimeGrid()
    schedule = zero_schedule(grid, calibration.params)
    trajectory = integrate_forward(calibration.initial, schedule, calibration.params, grid)
    j_value = objective(trajectory, schedule, calibration.cost, calibration.params, grid)
    return _build_report(
        "uncontrolled", calibration, grid, trajectory, schedule, j_value,
        structure=None, iterations=0, converged=True,
    )


def run_controlled(
    calibration: Calibration, config: SolverConfig | None = None
) -> ScenarioReport:
    """Solve for the optimal lockdown schedule and report the trajectory.

    Solver non-convergence propagates as :class:`NonConvergenceError`
    with diagnostics attached.
    """
    config = config or SolverConfig()
    if abs(calibration.params.population - calibration.cost.population) > 1e-6:
        raise ValueError(
            "calibration params and cost model disagree on the population scale"
        )
    result = solve_fbsm(calibration.initial, calibration.params, calibration.cost, config)
    return _build_report(
        "controlled", calibration, config.grid, result.trajectory, result.schedule,
        result.objective, structure=result.structure, iterations=result.iterations,
        converged=result.converged,
    )


@dataclass(frozen=True)
class PairComparison:
    """Ratios and differences of one ordered report pair (first vs second)."""

    scenario_a: str
    scenario_b: str
    objective_ratio: float
    objective_difference: float
    peak_day_shift: float
    peak_persons_ratio: float
    final_quarantined_difference: float
    final_quarantined_share_a: float
    final_quarantined_share_b: float


@dataclass(frozen=True)
class ComparisonReport:
    pairs: tuple[PairComparison, ...]

    def ratio(self, scenario_a: str, scenario_b: str) -> float:
        for pair in self.pairs:
            if pair.scenario_a == scenario_a and pair.scenario_b == scenario_b:
                return pair.objective_ratio
        raise KeyError(f"no comparison for ({scenario_a!r}, {scenario_b!r})")


def compare(reports) -> ComparisonReport:
    """All ordered pairwise comparisons of two or more scenario reports.

    ``objective_ratio`` is J(first) / J(second); peak statistics refer to
    the population-wide infectious pool (asymptomatic plus infected).
    """
    reports = list(reports)
    if len(reports) < 2:
        raise ValueError("compare needs at least two reports")
    labels = [f"{r.calibration}:{r.scenario}" for r in reports]
    pairs = []
    for i, a in enumerate(reports):
        for j, b in enumerate(reports):
            if i == j:
                continue
            pairs.append(
                PairComparison(
                    scenario_a=labels[i],
                    scenario_b=labels[j],
                    objective_ratio=a.objective / b.objective,
                    objective_difference=a.objective - b.objective,
                    peak_day_shift=a.peak_total_infectious.day - b.peak_total_infectious.day,
                    peak_persons_ratio=(
                        a.peak_total_infectious.persons / b.peak_total_infectious.persons
                    ),
                    final_quarantined_difference=(
                        a.final_quarantined_persons - b.final_quarantined_persons
                    ),
                    final_quarantined_share_a=a.final_quarantined_share,
                    final_quarantined_share_b=b.final_quarantined_share,
                )
            )
    return ComparisonReport(pairs=tuple(pairs))
