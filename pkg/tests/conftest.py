"""Shared fixtures.

The two shipped experiments are expensive to solve (tens of seconds at
the default grid), so every converged run is computed once per session
and reused by the unit tests and the acceptance suite.  Timed fixtures
return ``(report, seconds)``.
"""

from __future__ import annotations

import time
from dataclasses import replace

import numpy as np
import pytest

import lockdown_opt as lo


@pytest.fixture(scope="session")
def exp1():
    return lo.build_experiment1()


@pytest.fixture(scope="session")
def exp2():
    return lo.build_experiment2()


@pytest.fixture(scope="session")
def default_grid():
    return lo.TimeGrid()


@pytest.fixture(scope="session")
def exp1_uncontrolled(exp1, default_grid):
    start = time.perf_counter()
    report = lo.run_uncontrolled(exp1, default_grid)
    return report, time.perf_counter() - start


@pytest.fixture(scope="session")
def exp2_uncontrolled(exp2, default_grid):
    return lo.run_uncontrolled(exp2, default_grid)


@pytest.fixture(scope="session")
def exp1_controlled(exp1):
    start = time.perf_counter()
    report = lo.run_controlled(exp1, lo.SolverConfig())
    return report, time.perf_counter() - start


@pytest.fixture(scope="session")
def exp2_controlled(exp2):
    start = time.perf_counter()
    report = lo.run_controlled(exp2, lo.SolverConfig())
    return report, time.perf_counter() - start


@pytest.fixture(scope="session")
def exp1_concave_report(exp1):
    """Concave-cost solve.  Undamped updates keep every sample exactly on a
    corner, and the sweep reaches an exact fixed point in a few iterations."""
    calibration = lo.Calibration(
        exp1.name,
        exp1.params,
        replace(exp1.cost, shape=lo.CostShape.CONCAVE),
        exp1.initial,
        exp1.targets,
    )
    config = lo.SolverConfig(
        grid=lo.TimeGrid(step=0.2), relaxation=1.0, max_iterations=60
    )
    return lo.run_controlled(calibration, config)


@pytest.fixture(scope="session")
def gentle_two_group():
    """Slow-rate two-group problem for the coarse-grid gradient identity.

    Rates and the admissible lockdown cap are small so the zero-order-hold
    discretisation error stays well under the identity tolerance on a
    10-step grid, while every costate source term (cross-group coupling,
    quarantine and infected cost derivatives, terminal death price) stays
    active.
    """
    params = lo.ModelParams(
        beta=0.02,
        gamma=[0.005, 0.008],
        alpha=[0.4, 0.7],
        k=[0.06, 0.06],
        sigma=[0.05, 0.04],
        mu=[0.002, 0.01],
        group_share=[0.6, 0.4],
        population=1e6,
        u_max=[0.02, 0.02],
        group_names=("a", "b"),
    )
    cost = lo.CostModel(
        treatment_daily=[100.0, 150.0],
        infection_loss_daily=[50.0, 100.0],
        quarantine_loss_daily=[80.0, 40.0],
        death_cost=[5e5, 1e5],
        population=1e6,
    )
    initial = lo.system_state(2, S=[0.55, 0.40], I=[0.02, 0.01], R=[0.02, 0.0])
    grid = lo.TimeGrid(horizon=0.5, step=0.05)
    return params, cost, initial, grid


@pytest.fixture(scope="session")
def toy_single_group():
    """Aggressive single-group problem whose optimal two-step schedule is
    interior, used against the exhaustive-enumeration oracle."""
    params = lo.ModelParams(
        beta=8.0,
        gamma=[0.0],
        alpha=[0.7],
        k=[1.0],
        sigma=[0.3],
        mu=[0.2],
        group_share=[1.0],
        population=1e6,
        group_names=("all",),
    )
    cost = lo.CostModel(
        treatment_daily=[500.0],
        infection_loss_daily=[0.0],
        quarantine_loss_daily=[100.0],
        death_cost=[2e6],
        population=1e6,
    )
    initial = lo.system_state(1, S=[0.9], I=[0.1])
    grid = lo.TimeGrid(horizon=0.1, step=0.05)
    return params, cost, initial, grid


def total_infectious_series(report):
    from lockdown_opt import Compartment

    return report.trajectory[:, Compartment.A, :].sum(axis=1) + report.trajectory[
        :, Compartment.I, :
    ].sum(axis=1)
