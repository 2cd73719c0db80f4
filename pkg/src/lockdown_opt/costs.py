"""Monetary cost model: running integrand, terminal death cost, objective.

The planner pays, per day and per group: treatment plus lost productivity
for the symptomatic infected, and a productivity penalty on the rate at
which susceptibles are moved into quarantine.  Deaths are charged once,
as a terminal cost on the dead fraction at the horizon (equivalent to a
running charge of ``population * death_cost * mu * I`` because D is the
time integral of ``mu * I``).  A per-recovered profit slot exists in the
data model; every shipped calibration sets it to zero.

The quarantine integrand is ``quarantine_loss * (u + gamma)^e * S`` with
exponent e = 2 in convex mode and a configurable e in (0, 1) in concave
mode; the shape decides whether the optimal policy is interior or
bang-bang (see :mod:`lockdown_opt.control`).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import Compartment, ModelParams, TimeGrid, _as_group_array
from .errors import GridMismatchError

__all__ = [
    "CostShape",
    "CostModel",
    "quarantine_rate_cost",
    "running_cost",
    "running_cost_series",
    "terminal_cost",
    "objective",
]


class CostShape(str, Enum):
    CONVEX = "convex"
    CONCAVE = "concave"


@dataclass(frozen=True)
class CostModel:
    """Per-group monetary coefficients, in currency units per person.

    treatment_daily        daily treatment cost of one symptomatic infected
    infection_loss_daily   daily productivity loss of one symptomatic infected
    quarantine_loss_daily  coefficient of the quarantine-rate integrand
    death_cost             one-off cost of one death
    recovery_profit_daily  daily profit per recovered; zero in all shipped
                           calibrations
    population             absolute population count scaling all fractions
    shape                  convexity of the quarantine integrand in u
    concave_exponent       exponent used in concave mode only, in (0, 1)
    """

    treatment_daily: np.ndarray
    infection_loss_daily: np.ndarray
    quarantine_loss_daily: np.ndarray
    death_cost: np.ndarray
    population: float
    recovery_profit_daily: np.ndarray | None = None
    shape: CostShape = CostShape.CONVEX
    concave_exponent: float = 0.5

    def __post_init__(self):
        treatment = np.asarray(self.treatment_daily, dtype=float)
        n = treatment.shape[0]
        object.__setattr__(self, "treatment_daily", treatment)
        for name in ("infection_loss_daily", "quarantine_loss_daily", "death_cost"):
            object.__setattr__(self, name, _as_group_array(getattr(self, name), n, name))
        if self.recovery_profit_daily is None:
            object.__setattr__(self, "recovery_profit_daily", np.zeros(n))
        else:
            object.__setattr__(
                self,
                "recovery_profit_daily",
                _as_group_array(self.recovery_profit_daily, n, "recovery_profit_daily"),
            )
        object.__setattr__(self, "shape", CostShape(self.shape))
        for name in (
            "treatment_daily",
            "infection_loss_daily",
            "quarantine_loss_daily",
            "death_cost",
            "recovery_profit_daily",
        ):
            if np.any(getattr(self, name) < 0):
                raise ValueError(f"{name} must be non-negative")
        if self.population <= 0:
            raise ValueError("population must be positive")
        if not 0.0 < self.concave_exponent < 1.0:
            raise ValueError("concave_exponent must lie in (0, 1)")

    @property
    def n_groups(self) -> int:
        return self.treatment_daily.shape[0]

    @property
    def infected_cost_daily(self) -> np.ndarray:
        """Combined daily cost of one symptomatic infected (treatment + lost output)."""
        return self.treatment_daily + self.infection_loss_daily

    @property
    def quarantine_exponent(self) -> float:
        return 2.0 if self.shape is CostShape.CONVEX else self.concave_exponent


def quarantine_rate_cost(u: np.ndarray, cost: CostModel, params: ModelParams) -> np.ndarray:
    """Per-group quarantine integrand per unit susceptible:
    ``population * quarantine_loss * (u + gamma)^e``."""
    return (
        cost.population
        * cost.quarantine_loss_daily
        * (np.asarray(u, dtype=float) + params.gamma) ** cost.quarantine_exponent
    )


def running_cost(
    state: np.ndarray, u: np.ndarray, cost: CostModel, params: ModelParams
) -> float:
    """Instantaneous cost rate (currency/day) of one state/control sample."""
    state = np.asarray(state, dtype=float)
    infected = cost.population * cost.infected_cost_daily * state[Compartment.I]
    quarantine = quarantine_rate_cost(u, cost, params) * state[Compartment.S]
    recovery = cost.population * cost.recovery_profit_daily * state[Compartment.R]
    return float((infected + quarantine - recovery).sum())


def running_cost_series(
    trajectory: np.ndarray, schedule: np.ndarray, cost: CostModel, params: ModelParams
) -> np.ndarray:
    """Running cost evaluated at every grid node, vectorised over time."""
    trajectory = np.asarray(trajectory, dtype=float)
    schedule = np.asarray(schedule, dtype=float)
    z = cost.population
    infected = z * cost.infected_cost_daily * trajectory[:, Compartment.I, :]
    rate = (schedule + params.gamma) ** cost.quarantine_exponent
    quarantine = z * cost.quarantine_loss_daily * rate * trajectory[:, Compartment.S, :]
    recovery = z * cost.recovery_profit_daily * trajectory[:, Compartment.R, :]
    return (infected + quarantine - recovery).sum(axis=1)


def terminal_cost(final_state: np.ndarray, cost: CostModel) -> float:
    """One-off death cost ``sum_p population * death_cost_p * D_p(T)``."""
    final_state = np.asarray(final_state, dtype=float)
    return float((cost.population * cost.death_cost * final_state[Compartment.D]).sum())


def objective(
    trajectory: np.ndarray,
    schedule: np.ndarray,
    cost: CostModel,
    params: ModelParams,
    grid: TimeGrid,
) -> float:
    """Total cost J: trapezoidal quadrature of the running cost plus the
    terminal death cost.  Additive across groups."""
    trajectory = np.asarray(trajectory, dtype=float)
    schedule = np.asarray(schedule, dtype=float)
    if trajectory.shape[0] != grid.n_nodes or schedule.shape[0] != grid.n_nodes:
        raise GridMismatchError(
            f"trajectory ({trajectory.shape[0]} nodes) and schedule "
            f"({schedule.shape[0]} nodes) must match the grid ({grid.n_nodes} nodes)"
        )
    running = running_cost_series(trajectory, schedule, cost, params)
    integral = float(np.trapezoid(running, dx=grid.step)) if grid.n_steps else 0.0
    return integral + terminal_cost(trajectory[-1], cost)
