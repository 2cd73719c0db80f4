"""Pontryagin machinery: Hamiltonian, adjoint system, forward-backward sweep.

The Hamiltonian is the running-cost integrand plus the costate-weighted
dynamics; minimising it pointwise in the control gives the update rule of
the sweep.  Costates evolve backward as the negative state-gradient of the
*full* Hamiltonian, which couples groups through the shared infectious
pool: the asymptomatic and infected costate equations carry
``beta * sum_q (lambda_S_q - lambda_A_q) * S_q`` summed over every group,
plus source terms from the implemented running cost (the per-infected
daily cost in the infected equation, the quarantine-rate integrand in the
susceptible equation).  ``paper_decoupled_adjoint`` switches those two
equations to their own-group-only variant for comparison runs.

Terminal costates are zero except for the dead compartment, whose costate
is pinned to the per-death cost so that the terminal death charge is
differentiated through the sweep (it then enters the infected equation as
a constant shadow price, exactly as an equivalent running death charge
would).

With convex quarantine costs the pointwise minimiser is the clamped
stationary point ``u* = clamp(phi / (2 Z E_S) - gamma, 0, u_max)`` where
``phi = lambda_S - lambda_Q`` is the switching function (the susceptible
weight common to both Hamiltonian terms cancels).  With concave costs the
minimiser is bang-bang: full lockdown wherever the switching gain
``phi * u_max`` beats the quarantine integrand's increment, else none.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .costs import CostModel, CostShape, quarantine_rate_cost, running_cost, objective
from .dynamics import (
    Compartment,
    ModelParams,
    TimeGrid,
    integrate_forward,
    validate_state,
)
from .errors import GridMismatchError, IntegrationBlowupError, NonConvergenceError

__all__ = [
    "SolverConfig",
    "Phase",
    "PolicyStructure",
    "SolveReport",
    "hamiltonian",
    "switching_function",
    "adjoint_derivative",
    "terminal_adjoint",
    "integrate_backward",
    "optimal_control_pointwise",
    "control_gradient",
    "solve_fbsm",
    "extract_structure",
]

# Susceptible shares below this are treated as empty: the control is
# irrelevant there and the stationarity cancellation is ill-posed.
S_EMPTY = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Forward-backward sweep settings.

    relaxation      damping weight on the schedule update, in (0, 1]
    tolerance       sup-norm change of the schedule that counts as converged
    paper_decoupled_adjoint
                    replace the cross-group costate coupling with the
                    own-group-only variant, for comparison runs
    """

    grid: TimeGrid = field(default_factory=TimeGrid)
    max_iterations: int = 500
    relaxation: float = 0.5
    tolerance: float = 1e-6
    paper_decoupled_adjoint: bool = False

    def __post_init__(self):
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in (0, 1]")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


class Phase(IntEnum):
    ZERO = 0
    INTERIOR = 1
    FULL = 2


@dataclass(frozen=True)
class PolicyStructure:
    """Switching structure of a converged schedule.

    ``t_full_end`` (t0) is the end of the leading full-lockdown run per
    group (0 where the schedule does not start at u_max); ``t_zero_start``
    (t1) is the start of the trailing no-lockdown run (the horizon where
    the schedule does not end at zero).  ``phases`` labels every node.
    """

    t_full_end: np.ndarray
    t_zero_start: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        if np.any(self.t_full_end > self.t_zero_start + 1e-12):
            raise ValueError("t_full_end must not exceed t_zero_start")


@dataclass
class SolveReport:
    """Everything the sweep produced: trajectories, costates, schedule,
    the objective value, the switching structure, and iteration diagnostics."""

    trajectory: np.ndarray
    adjoint: np.ndarray
    schedule: np.ndarray
    objective: float
    structure: PolicyStructure
    iterations: int
    schedule_changes: list[float]
    converged: bool
    hamiltonian_scale: float
    interior_stationarity: float


def switching_function(adjoint: np.ndarray) -> np.ndarray:
    """Per-group switching values ``lambda_S - lambda_Q``."""
    adjoint = np.asarray(adjoint, dtype=float)
    return adjoint[..., Compartment.S, :] - adjoint[..., Compartment.Q, :]


def hamiltonian(
    state: np.ndarray,
    adjoint: np.ndarray,
    u: np.ndarray,
    params: ModelParams,
    cost: CostModel,
) -> float:
    """Running-cost integrand plus costate-weighted dynamics (currency/day).

    Written in grouped-difference form so that the identity
    ``H = running_cost + <adjoint, derivative>`` is a genuine cross-check
    of two independent code paths.
    """
    state = np.asarray(state, dtype=float)
    adjoint = np.asarray(adjoint, dtype=float)
    u = np.asarray(u, dtype=float)
    s, a, i = state[Compartment.S], state[Compartment.A], state[Compartment.I]
    l_s = adjoint[Compartment.S]
    l_q = adjoint[Compartment.Q]
    l_a = adjoint[Compartment.A]
    l_i = adjoint[Compartment.I]
    l_r = adjoint[Compartment.R]
    l_d = adjoint[Compartment.D]

    infectious = a.sum() + i.sum()
    h_dyn = (
        (l_a - l_s) * params.beta * s * infectious
        + (l_q - l_s) * (u + params.gamma) * s
        + (l_i - l_a) * params.alpha * params.k * a
        + (l_r - l_a) * (1.0 - params.alpha) * params.sigma * a
        + (l_r - l_i) * params.sigma * i
        + (l_d - l_i) * params.mu * i
    )
    return running_cost(state, u, cost, params) + float(h_dyn.sum())


def adjoint_derivative(
    state: np.ndarray,
    adjoint: np.ndarray,
    u: np.ndarray,
    params: ModelParams,
    cost: CostModel,
    paper_decoupled: bool = False,
) -> np.ndarray:
    """Costate rates ``-dH/dx`` for every compartment of every group.

    The quarantined and dead costates are identically constant.  With
    ``paper_decoupled`` the asymptomatic/infected equations use only the
    own-group ``(lambda_S - lambda_A) * beta * S`` term instead of the
    cross-group sum (the running-cost source terms are kept either way).
    """
    state = np.asarray(state, dtype=float)
    adjoint = np.asarray(adjoint, dtype=float)
    u = np.asarray(u, dtype=float)
    return _make_adjoint_rhs(params, cost, paper_decoupled)(state, adjoint, u)


def terminal_adjoint(params: ModelParams, cost: CostModel) -> np.ndarray:
    """Transversality values: zero everywhere except the dead costate,
    which carries the per-death cost."""
    lam = np.zeros((len(Compartment), params.n_groups))
    lam[Compartment.D] = cost.population * cost.death_cost
    return lam


def _make_adjoint_rhs(params: ModelParams, cost: CostModel, paper_decoupled: bool):
    beta = params.beta
    gamma = params.gamma
    onset = params.alpha * params.k
    silent_recovery = (1.0 - params.alpha) * params.sigma
    sigma = params.sigma
    mu = params.mu
    z_quar = cost.population * cost.quarantine_loss_daily
    exponent = cost.quarantine_exponent
    z_infected = cost.population * cost.infected_cost_daily
    z_recovery = cost.population * cost.recovery_profit_daily

    def rhs(state: np.ndarray, lam: np.ndarray, u: np.ndarray) -> np.ndarray:
        s = state[0]
        a = state[2]
        i = state[3]
        l_s, l_q, l_a, l_i, l_r, l_d = lam
        infectious = a.sum() + i.sum()
        own = (l_s - l_a) * beta * s
        coupling = own if paper_decoupled else own.sum()
        out = np.zeros_like(lam)
        out[0] = (
            -z_quar * (u + gamma) ** exponent
            + (l_s - l_a) * beta * infectious
            + (l_s - l_q) * (u + gamma)
        )
        out[2] = coupling + (l_a - l_i) * onset + (l_a - l_r) * silent_recovery
        out[3] = -z_infected + coupling + (l_i - l_r) * sigma + (l_i - l_d) * mu
        out[4] = z_recovery
        return out

    return rhs


def integrate_backward(
    trajectory: np.ndarray,
    schedule: np.ndarray,
    params: ModelParams,
    cost: CostModel,
    grid: TimeGrid,
    paper_decoupled: bool = False,
) -> np.ndarray:
    """RK4 costate trajectory from the horizon back to zero.

    States between nodes are taken as the midpoint average of the stored
    trajectory; the control uses the same left-node hold as the forward
    pass.  The quarantined costate stays identically zero and the dead
    costate stays at the per-death cost (their rates vanish exactly).
    """
    trajectory = np.asarray(trajectory, dtype=float)
    schedule = np.asarray(schedule, dtype=float)
    if trajectory.shape[0] != grid.n_nodes or schedule.shape[0] != grid.n_nodes:
        raise GridMismatchError(
            f"trajectory/schedule nodes ({trajectory.shape[0]}, {schedule.shape[0]}) "
            f"must match the grid ({grid.n_nodes})"
        )
    rhs = _make_adjoint_rhs(params, cost, paper_decoupled)
    h = grid.step
    half = 0.5 * h
    sixth = h / 6.0
    adjoint = np.empty_like(trajectory)
    lam = terminal_adjoint(params, cost)
    adjoint[-1] = lam
    for m in range(grid.n_steps - 1, -1, -1):
        u = schedule[m]
        x_hi = trajectory[m + 1]
        x_lo = trajectory[m]
        x_mid = 0.5 * (x_hi + x_lo)
        k1 = rhs(x_hi, lam, u)
        k2 = rhs(x_mid, lam - half * k1, u)
        k3 = rhs(x_mid, lam - half * k2, u)
        k4 = rhs(x_lo, lam - h * k3, u)
        lam = lam - sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(lam)):
            raise IntegrationBlowupError(
                f"costate became non-finite at t={m * h:.6g}", time=m * h
            )
        adjoint[m] = lam
    return adjoint


def _pointwise_schedule(
    susceptible: np.ndarray,
    phi: np.ndarray,
    params: ModelParams,
    cost: CostModel,
) -> np.ndarray:
    """Vectorised Hamiltonian minimiser; works on node-stacked arrays."""
    z_quar = cost.population * cost.quarantine_loss_daily
    if cost.shape is CostShape.CONVEX:
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(
                z_quar > 0.0,
                phi / (2.0 * z_quar) - params.gamma,
                np.where(phi > 0.0, params.u_max, 0.0),
            )
        u = np.clip(u, 0.0, params.u_max)
    else:
        q = cost.concave_exponent
        increment = z_quar * ((params.u_max + params.gamma) ** q - params.gamma**q)
        u = np.where(phi * params.u_max >= increment, params.u_max, 0.0)
    return np.where(susceptible < S_EMPTY, 0.0, u)


def optimal_control_pointwise(
    state: np.ndarray,
    adjoint: np.ndarray,
    params: ModelParams,
    cost: CostModel,
) -> np.ndarray:
    """Per-group control minimising the Hamiltonian at one state/costate pair.

    Convex mode clamps the stationary point of the quadratic integrand;
    concave mode compares the endpoint values of the integrand (ties go to
    full lockdown).  Groups with an empty susceptible pool get zero.
    """
    state = np.asarray(state, dtype=float)
    adjoint = np.asarray(adjoint, dtype=float)
    return _pointwise_schedule(
        state[Compartment.S], switching_function(adjoint), params, cost
    )


def control_gradient(
    state: np.ndarray,
    adjoint: np.ndarray,
    u: np.ndarray,
    params: ModelParams,
    cost: CostModel,
) -> np.ndarray:
    """``dH/du`` per group; zero at interior optima, used as a stationarity
    diagnostic and by the gradient-identity tests."""
    state = np.asarray(state, dtype=float)
    u = np.asarray(u, dtype=float)
    s = state[..., Compartment.S, :]
    phi = switching_function(adjoint)
    e = cost.quarantine_exponent
    z_quar = cost.population * cost.quarantine_loss_daily
    # concave mode has an infinite marginal at u + gamma = 0; that is the
    # honest one-sided slope there, so let the inf through quietly
    with np.errstate(divide="ignore"):
        marginal = e * z_quar * (u + params.gamma) ** (e - 1.0)
    return s * (marginal - phi)


def solve_fbsm(
    initial: np.ndarray,
    params: ModelParams,
    cost: CostModel,
    config: SolverConfig,
) -> SolveReport:
    """Forward-backward sweep to a stationary lockdown schedule.

    Each iteration integrates the state forward under the current
    schedule, the costates backward, forms the pointwise optimal controls,
    and blends them into the schedule with the configured relaxation.
    Convergence is a sup-norm schedule change below the tolerance; running
    out of iterations raises :class:`NonConvergenceError` with the change
    history and the last iterate attached (bang-bang problems chatter at
    the switch and typically end there -- inspect ``error.report``).
    """
    initial = validate_state(initial, params)
    grid = config.grid
    u = np.zeros((grid.n_nodes, params.n_groups))
    changes: list[float] = []
    trajectory = adjoint = None
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        trajectory = integrate_forward(initial, u, params, grid)
        adjoint = integrate_backward(
            trajectory, u, params, cost, grid, config.paper_decoupled_adjoint
        )
        u_new = _pointwise_schedule(
            trajectory[:, Compartment.S, :],
            switching_function(adjoint),
            params,
            cost,
        )
        u_next = (1.0 - config.relaxation) * u + config.relaxation * u_new
        change = float(np.abs(u_next - u).max())
        changes.append(change)
        u = u_next
        if change < config.tolerance:
            converged = True
            break

    trajectory = integrate_forward(initial, u, params, grid)
    adjoint = integrate_backward(
        trajectory, u, params, cost, grid, config.paper_decoupled_adjoint
    )
    report = _build_report(
        trajectory, adjoint, u, params, cost, grid, iterations, changes, converged
    )
    if not converged:
        raise NonConvergenceError(
            f"sweep did not converge in {config.max_iterations} iterations "
            f"(last change {changes[-1]:.3e}, tolerance {config.tolerance:.3e}); "
            "retry with a smaller relaxation or inspect error.report",
            history=changes,
            report=report,
        )
    return report


def _build_report(trajectory, adjoint, u, params, cost, grid, iterations, changes, converged):
    j_value = objective(trajectory, u, cost, params, grid)
    structure = extract_structure(u, grid, params.u_max)

    # Stationarity diagnostic: |dH/du| on interior nodes against the
    # Hamiltonian magnitude along the trajectory.
    gradient = control_gradient(trajectory, adjoint, u, params, cost)
    delta = 1e-3 * params.u_max
    interior = (u > delta) & (u < params.u_max - delta)
    worst = float(np.abs(gradient[interior]).max()) if interior.any() else 0.0
    sample = np.linspace(0, grid.n_steps, min(grid.n_nodes, 200)).astype(int)
    h_scale = max(
        float(
            max(
                abs(hamiltonian(trajectory[m], adjoint[m], u[m], params, cost))
                for m in sample
            )
        ),
        1.0,
    )
    return SolveReport(
        trajectory=trajectory,
        adjoint=adjoint,
        schedule=u,
        objective=j_value,
        structure=structure,
        iterations=iterations,
        schedule_changes=changes,
        converged=converged,
        hamiltonian_scale=h_scale,
        interior_stationarity=worst,
    )


def extract_structure(
    schedule: np.ndarray, grid: TimeGrid, u_max: np.ndarray
) -> PolicyStructure:
    """Classify nodes as full / interior / zero and locate the switch times.

    A node is full when ``u > u_max - delta`` and zero when ``u < delta``
    with ``delta = 1e-3 * u_max``.  t0 ends the leading full run (0 when
    there is none); t1 starts the trailing zero run (the horizon when
    there is none).
    """
    schedule = np.asarray(schedule, dtype=float)
    u_max = np.asarray(u_max, dtype=float)
    n_nodes, n_groups = schedule.shape
    if n_nodes != grid.n_nodes:
        raise GridMismatchError(
            f"schedule has {n_nodes} nodes, grid has {grid.n_nodes}"
        )
    delta = 1e-3 * u_max
    phases = np.full((n_nodes, n_groups), Phase.INTERIOR, dtype=np.int8)
    phases[schedule < delta] = Phase.ZERO
    phases[schedule > u_max - delta] = Phase.FULL

    times = grid.nodes()
    t_full_end = np.zeros(n_groups)
    t_zero_start = np.full(n_groups, grid.horizon)
    for g in range(n_groups):
        column = phases[:, g]
        if column[0] == Phase.FULL:
            run_end = 0
            while run_end + 1 < n_nodes and column[run_end + 1] == Phase.FULL:
                run_end += 1
            t_full_end[g] = times[run_end]
        nonzero = np.nonzero(column != Phase.ZERO)[0]
        if nonzero.size == 0:
            t_zero_start[g] = times[0]
        elif nonzero[-1] + 1 < n_nodes:
            t_zero_start[g] = times[nonzero[-1] + 1]
    return PolicyStructure(
        t_full_end=t_full_end, t_zero_start=t_zero_start, phases=phases
    )
