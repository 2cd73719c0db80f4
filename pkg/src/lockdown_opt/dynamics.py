"""SQAIRD compartment dynamics and fixed-step forward integration.

The population is split into age groups, each holding six compartments:
Susceptible, Quarantined, Asymptomatic, Infected, Recovered, Dead.  States
are ``(6, n_groups)`` float arrays indexed by :class:`Compartment` on the
first axis; trajectories stack states along a leading time axis.  All
occupancies are fractions of the total population (which is normalised
to one), so per-group compartment sums are conserved by construction.

Integration is classic fixed-step fourth-order Runge-Kutta with the
control held piecewise-constant over each step (zero-order hold on the
left grid node), which keeps the forward grid aligned with the backward
adjoint grid used by the sweep solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import GridMismatchError, IntegrationBlowupError, InvalidStateError

__all__ = [
    "Compartment",
    "ModelParams",
    "TimeGrid",
    "system_state",
    "validate_state",
    "validate_controls",
    "zero_schedule",
    "derivative",
    "total_infectious",
    "integrate_forward",
]

# Undershoots smaller than this are rounding noise and are clamped to zero;
# anything outside the blow-up bounds aborts the integration.
NEGATIVE_TOLERANCE = 1e-12
BLOWUP_LOW = -1e-6
BLOWUP_HIGH = 1.0 + 1e-6


class Compartment(IntEnum):
    S = 0
    Q = 1
    A = 2
    I = 3
    R = 4
    D = 5


def _as_group_array(value, n: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {arr.shape}")
    return arr


@dataclass(frozen=True)
class ModelParams:
    """Epidemiological rates for every age group plus the shared infection rate.

    beta          shared infection rate (1/day), applied to S * (A_total + I_total)
    gamma         voluntary self-quarantine rate per group (1/day)
    alpha         probability that an asymptomatic case develops symptoms, in (0, 1)
    k             asymptomatic-to-infected transition speed (1/day)
    sigma         recovery rate (1/day)
    mu            death rate of the infected (1/day)
    group_share   population share N_p of each group; shares sum to one
    population    absolute population count used to scale monetary quantities
    u_max         largest admissible lockdown rate per group (1/day);
                  defaults to 1 - gamma (total lockdown)
    group_names   labels used in reports and file output
    """

    beta: float
    gamma: np.ndarray
    alpha: np.ndarray
    k: np.ndarray
    sigma: np.ndarray
    mu: np.ndarray
    group_share: np.ndarray
    population: float
    u_max: np.ndarray | None = None
    group_names: tuple[str, ...] = ()

    def __post_init__(self):
        shares = np.asarray(self.group_share, dtype=float)
        n = shares.shape[0]
        object.__setattr__(self, "group_share", shares)
        for name in ("gamma", "alpha", "k", "sigma", "mu"):
            object.__setattr__(self, name, _as_group_array(getattr(self, name), n, name))
        if self.u_max is None:
            object.__setattr__(self, "u_max", 1.0 - self.gamma)
        else:
            object.__setattr__(self, "u_max", _as_group_array(self.u_max, n, "u_max"))
        names = self.group_names or tuple(f"group{i}" for i in range(n))
        if len(names) != n:
            raise ValueError(f"expected {n} group names, got {len(names)}")
        object.__setattr__(self, "group_names", tuple(names))

        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        for name in ("gamma", "k", "sigma", "mu"):
            if np.any(getattr(self, name) < 0):
                raise ValueError(f"{name} must be non-negative")
        if np.any((self.alpha <= 0) | (self.alpha >= 1)):
            raise ValueError("alpha must lie in the open interval (0, 1)")
        if abs(shares.sum() - 1.0) > 1e-9:
            raise ValueError(f"group shares must sum to 1, got {shares.sum()!r}")
        if np.any(self.u_max <= 0):
            raise ValueError("u_max must be positive")
        if self.population <= 0:
            raise ValueError("population must be positive")

    @property
    def n_groups(self) -> int:
        return self.group_share.shape[0]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, horizon] with step ``step`` (days)."""

    horizon: float = 365.0
    step: float = 0.1

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        m = round(self.horizon / self.step) if self.horizon > 0 else 0
        if abs(m * self.step - self.horizon) > 1e-9:
            raise ValueError(
                f"horizon {self.horizon} is not an integer multiple of step {self.step}"
            )

    @property
    def n_steps(self) -> int:
        return round(self.horizon / self.step) if self.horizon > 0 else 0

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_nodes)


def system_state(n_groups: int, **compartments) -> np.ndarray:
    """Build a ``(6, n_groups)`` state from per-compartment keyword arrays.

    Unspecified compartments are zero, e.g.
    ``system_state(3, S=[0.44, 0.27, 0.28], I=[0.002, 0.001, 0.001])``.
    """
    state = np.zeros((len(Compartment), n_groups))
    for name, value in compartments.items():
        state[Compartment[name]] = _as_group_array(value, n_groups, name)
    return state


def validate_state(state: np.ndarray, params: ModelParams, tol: float = NEGATIVE_TOLERANCE):
    state = np.asarray(state, dtype=float)
    if state.shape != (len(Compartment), params.n_groups):
        raise InvalidStateError(
            f"state must have shape (6, {params.n_groups}), got {state.shape}"
        )
    if not np.all(np.isfinite(state)):
        raise InvalidStateError("state contains non-finite values")
    if np.any(state < -tol):
        raise InvalidStateError(f"state has negative compartments beyond tolerance {tol}")
    return state


def validate_controls(u: np.ndarray, params: ModelParams) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (params.n_groups,):
        raise ValueError(f"controls must have shape ({params.n_groups},), got {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("controls contain non-finite values")
    if np.any(u < -1e-12) or np.any(u > params.u_max + 1e-12):
        raise ValueError("controls must lie in [0, u_max] per group")
    return u


def zero_schedule(grid: TimeGrid, params: ModelParams) -> np.ndarray:
    """No-lockdown schedule: ``(n_nodes, n_groups)`` of zeros."""
    return np.zeros((grid.n_nodes, params.n_groups))


def total_infectious(state: np.ndarray) -> tuple[float, float]:
    """Population-wide asymptomatic and infected fractions ``(A_total, I_total)``."""
    state = np.asarray(state, dtype=float)
    return float(state[Compartment.A].sum()), float(state[Compartment.I].sum())


def _make_rhs(params: ModelParams):
    """Bind rate constants once; the returned closure is the hot path."""
    beta = params.beta
    gamma = params.gamma
    onset = params.alpha * params.k          # A -> I flow coefficient
    silent_recovery = (1.0 - params.alpha) * params.sigma
    sigma = params.sigma
    mu = params.mu

    def rhs(state: np.ndarray, u: np.ndarray) -> np.ndarray:
        s = state[0]
        a = state[2]
        i = state[3]
        # every flow is computed once and moved between exactly two rows,
        # so the per-group row sum cancels to zero in floating point
        infection = beta * (a.sum() + i.sum()) * s
        quarantine = (u + gamma) * s
        a_to_i = onset * a
        a_to_r = silent_recovery * a
        i_to_r = sigma * i
        i_to_d = mu * i
        out = np.empty_like(state)
        out[0] = -infection - quarantine
        out[1] = quarantine
        out[2] = infection - a_to_i - a_to_r
        out[3] = a_to_i - i_to_r - i_to_d
        out[4] = i_to_r + a_to_r
        out[5] = i_to_d
        return out

    return rhs


def derivative(state: np.ndarray, u: np.ndarray, params: ModelParams) -> np.ndarray:
    """Right-hand side of the SQAIRD system, as rates per day.

    Per group p, with A and I summed over all groups:

        dS = -beta*S*(A+I) - (u+gamma)*S
        dQ = (u+gamma)*S
        dA = beta*S*(A+I) - alpha*k*A - (1-alpha)*sigma*A
        dI = alpha*k*A - (sigma+mu)*I
        dR = sigma*I + (1-alpha)*sigma*A
        dD = mu*I
    """
    state = validate_state(state, params)
    u = validate_controls(u, params)
    return _make_rhs(params)(state, u)


def integrate_forward(
    initial: np.ndarray,
    schedule: np.ndarray,
    params: ModelParams,
    grid: TimeGrid,
) -> np.ndarray:
    """RK4 trajectory of shape ``(n_nodes, 6, n_groups)`` under the schedule.

    The schedule is sampled on the grid nodes and held constant over each
    step (the value at the left node applies on ``[t_k, t_{k+1})``).  Tiny
    negative undershoots (< 1e-12) are clamped to zero after each step;
    compartments escaping ``[-1e-6, 1 + 1e-6]`` abort with
    :class:`IntegrationBlowupError`.
    """
    initial = validate_state(initial, params)
    schedule = np.asarray(schedule, dtype=float)
    if schedule.shape != (grid.n_nodes, params.n_groups):
        raise GridMismatchError(
            f"schedule shape {schedule.shape} does not match grid/groups "
            f"({grid.n_nodes}, {params.n_groups})"
        )
    if not np.all(np.isfinite(schedule)):
        raise ValueError("schedule contains non-finite values")
    if np.any(schedule < -1e-12) or np.any(schedule > params.u_max + 1e-12):
        raise ValueError("schedule samples must lie in [0, u_max] per group")

    rhs = _make_rhs(params)
    h = grid.step
    half = 0.5 * h
    sixth = h / 6.0
    trajectory = np.empty((grid.n_nodes, len(Compartment), params.n_groups))
    trajectory[0] = initial
    x = initial
    for m in range(grid.n_steps):
        u = schedule[m]
        k1 = rhs(x, u)
        k2 = rhs(x + half * k1, u)
        k3 = rhs(x + half * k2, u)
        k4 = rhs(x + h * k3, u)
        x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        low = x.min()
        if low < BLOWUP_LOW or x.max() > BLOWUP_HIGH or not np.isfinite(low):
            raise IntegrationBlowupError(
                f"compartment left [{BLOWUP_LOW}, {BLOWUP_HIGH}] at t={(m + 1) * h:.6g}",
                time=(m + 1) * h,
            )
        if low < 0.0:
            x[(x < 0.0) & (x > -NEGATIVE_TOLERANCE)] = 0.0
        trajectory[m + 1] = x
    return trajectory
