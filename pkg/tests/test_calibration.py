import numpy as np
import pytest

import lockdown_opt as lo
from lockdown_opt import Compartment
from lockdown_opt.calibration import (
    HOSPITALIZATION_PROFILES,
    _reconcile_cost_rows,
    calibration_from_sections,
    calibration_to_sections,
)


# --- treatment cost ---------------------------------------------------------


def test_treatment_cost_published_values():
    """The three published daily treatment costs, to half a cent."""
    young = lo.treatment_cost(HOSPITALIZATION_PROFILES["young"])
    adult = lo.treatment_cost(HOSPITALIZATION_PROFILES["adult"])
    old = lo.treatment_cost(HOSPITALIZATION_PROFILES["old"])
    assert young == pytest.approx(8.57, abs=0.005)
    assert adult == pytest.approx(54.00, abs=0.005)
    assert old == pytest.approx(234.00, abs=0.005)


def test_treatment_cost_never_hospitalized():
    profile = lo.HospitalizationProfile(0.0, 0.9)
    assert lo.treatment_cost(profile) == 0.0


def test_hospitalization_profile_validation():
    with pytest.raises(ValueError):
        lo.HospitalizationProfile(1.5, 0.1)
    with pytest.raises(ValueError):
        lo.HospitalizationProfile(0.1, 0.1, ordinary_daily_cost=-1.0)


# --- experiment builders ----------------------------------------------------


def test_experiment1_core_values(exp1):
    params, cost = exp1.params, exp1.cost
    np.testing.assert_array_equal(params.mu, [0.001, 0.01, 0.06])
    np.testing.assert_array_equal(params.gamma, [0.0, 0.0, 0.1])
    assert params.beta == 0.48
    assert params.population == 49_581_000.0
    s0 = exp1.initial[Compartment.S]
    i0 = exp1.initial[Compartment.I]
    assert (s0.sum() + i0.sum()) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(params.u_max, [1.0, 1.0, 0.9], rtol=1e-15)


def test_experiment1_cost_reconciliation(exp1):
    cost = exp1.cost
    np.testing.assert_allclose(
        cost.infected_cost_daily, [200.64, 246.07, 283.94], atol=0.01
    )
    np.testing.assert_allclose(
        cost.quarantine_loss_daily, 0.7 * cost.infection_loss_daily, atol=0.01
    )
    # young quarantine coefficient: 192.07 * 0.7 = 134.449
    assert cost.quarantine_loss_daily[0] == pytest.approx(0.7 * 192.07, abs=0.01)


def test_experiment2_core_values(exp2):
    params, cost = exp2.params, exp2.cost
    assert params.alpha[0] == 0.636
    assert cost.death_cost[0] == 1_872_153.0
    s0 = exp2.initial[Compartment.S, 0]
    i0 = exp2.initial[Compartment.I, 0]
    assert s0 + i0 == pytest.approx(1.0, abs=1e-12)
    # only the merged infected cost is published for the aggregate group
    assert cost.treatment_daily[0] == 236.413
    assert cost.infection_loss_daily[0] == 0.0


def test_reconciliation_failure_names_the_row():
    with pytest.raises(lo.CalibrationError, match="adult"):
        _reconcile_cost_rows(
            ("young", "adult"),
            np.array([8.57, 60.0]),
            np.array([192.07, 192.07]),
            np.array([200.64, 246.07]),
            np.array([134.45, 134.45]),
        )
    with pytest.raises(lo.CalibrationError, match="young"):
        _reconcile_cost_rows(
            ("young",),
            np.array([8.57]),
            np.array([192.07]),
            np.array([200.64]),
            np.array([100.0]),
        )


def test_builtin_calibration_lookup():
    assert lo.builtin_calibration("exp1").name == "exp1"
    assert lo.builtin_calibration("exp2").name == "exp2"
    with pytest.raises(lo.CalibrationError):
        lo.builtin_calibration("exp3")


# --- published-table completeness ------------------------------------------
#
# Every number from the simulation-parameter table (both experiment
# columns) and the trajectory-maxima table must land in exactly one built
# field.  The manifest below maps each table cell to its field.


def _manifest(exp1, exp2):
    p1, c1, t1 = exp1.params, exp1.cost, exp1.targets
    p2, c2, t2 = exp2.params, exp2.cost, exp2.targets
    i1, i2 = exp1.initial, exp2.initial
    entries = [
        ("exp1.population", 49_581_000, p1.population),
        ("exp1.S0.young", 0.4446, i1[Compartment.S, 0]),
        ("exp1.S0.adult", 0.2709, i1[Compartment.S, 1]),
        ("exp1.S0.old", 0.2796, i1[Compartment.S, 2]),
        ("exp1.Q0", 0, float(np.abs(i1[Compartment.Q]).max())),
        ("exp1.A0", 0, float(np.abs(i1[Compartment.A]).max())),
        ("exp1.I0.young", 0.0022, i1[Compartment.I, 0]),
        ("exp1.I0.adult", 0.0013, i1[Compartment.I, 1]),
        ("exp1.I0.old", 0.0014, i1[Compartment.I, 2]),
        ("exp1.R0", 0, float(np.abs(i1[Compartment.R]).max())),
        ("exp1.D0", 0, float(np.abs(i1[Compartment.D]).max())),
        ("exp1.sigma.young", 0.2, p1.sigma[0]),
        ("exp1.sigma.adult", 0.066, p1.sigma[1]),
        ("exp1.sigma.old", 0.04, p1.sigma[2]),
        ("exp1.gamma.young", 0, p1.gamma[0]),
        ("exp1.gamma.adult", 0, p1.gamma[1]),
        ("exp1.gamma.old", 0.1, p1.gamma[2]),
        ("exp1.mu.young", 0.001, p1.mu[0]),
        ("exp1.mu.adult", 0.01, p1.mu[1]),
        ("exp1.mu.old", 0.06, p1.mu[2]),
        ("exp1.beta", 0.48, p1.beta),
        ("exp1.k", 0.1923, p1.k[0]),
        ("exp1.alpha.young", 0.5, p1.alpha[0]),
        ("exp1.alpha.adult", 0.66, p1.alpha[1]),
        ("exp1.alpha.old", 0.83, p1.alpha[2]),
        ("exp1.infected_cost.young", 200.64, c1.infected_cost_daily[0]),
        ("exp1.infected_cost.adult", 246.07, c1.infected_cost_daily[1]),
        ("exp1.infected_cost.old", 283.94, c1.infected_cost_daily[2]),
        ("exp1.quarantine_cost.young", 134.45, c1.quarantine_loss_daily[0]),
        ("exp1.quarantine_cost.adult", 134.45, c1.quarantine_loss_daily[1]),
        ("exp1.quarantine_cost.old", 34.96, c1.quarantine_loss_daily[2]),
        ("exp1.death_cost.young", 2_800_000, c1.death_cost[0]),
        ("exp1.death_cost.adult", 2_000_000, c1.death_cost[1]),
        ("exp1.death_cost.old", 273_000, c1.death_cost[2]),
        ("exp1.J.uncontrolled", 3.5809e12, t1.objective_uncontrolled),
        ("exp1.J.controlled", 2.0418e12, t1.objective_controlled),
        ("exp2.population", 49_581_000, p2.population),
        ("exp2.S0", 0.9951, i2[Compartment.S, 0]),
        ("exp2.I0", 0.0049, i2[Compartment.I, 0]),
        ("exp2.sigma", 0.118, p2.sigma[0]),
        ("exp2.gamma", 0.028, p2.gamma[0]),
        ("exp2.mu", 0.02, p2.mu[0]),
        ("exp2.beta", 0.48, p2.beta),
        ("exp2.k", 0.1923, p2.k[0]),
        ("exp2.alpha", 0.636, p2.alpha[0]),
        ("exp2.infected_cost", 236.413, c2.infected_cost_daily[0]),
        ("exp2.quarantine_cost", 106.493, c2.quarantine_loss_daily[0]),
        ("exp2.death_cost", 1_872_153, c2.death_cost[0]),
        ("exp2.J.uncontrolled", 5.9475e12, t2.objective_uncontrolled),
        ("exp2.J.controlled", 3.1905e12, t2.objective_controlled),
        # trajectory maxima, controlled case
        ("exp1.maxI.young", 1_262_100, t1.peak_infected[0]),
        ("exp1.maxI.adult", 2_435_100, t1.peak_infected[1]),
        ("exp1.maxI.old", 566_020, t1.peak_infected[2]),
        ("exp1.maxA.young", 2_972_500, t1.peak_asymptomatic[0]),
        ("exp1.maxA.adult", 2_204_600, t1.peak_asymptomatic[1]),
        ("exp1.maxA.old", 486_640, t1.peak_asymptomatic[2]),
        ("exp1.maxD.young", 30_750, t1.peak_dead[0]),
        ("exp1.maxD.adult", 831_560, t1.peak_dead[1]),
        ("exp1.maxD.old", 957_180, t1.peak_dead[2]),
        ("exp2.maxI", 3_175_100, t2.peak_infected[0]),
        ("exp2.maxA", 4_416_100, t2.peak_asymptomatic[0]),
        ("exp2.maxD", 1_693_400, t2.peak_dead[0]),
        # trajectory maxima, uncontrolled case
        ("exp1.maxI.unc.young", 2_648_700, t1.peak_infected_uncontrolled[0]),
        ("exp1.maxI.unc.adult", 4_755_800, t1.peak_infected_uncontrolled[1]),
        ("exp1.maxI.unc.old", 1_069_000, t1.peak_infected_uncontrolled[2]),
        ("exp1.maxA.unc.young", 6_549_700, t1.peak_asymptomatic_uncontrolled[0]),
        ("exp1.maxA.unc.adult", 4_775_000, t1.peak_asymptomatic_uncontrolled[1]),
        ("exp1.maxA.unc.old", 982_260, t1.peak_asymptomatic_uncontrolled[2]),
        ("exp1.maxD.unc.young", 53_738, t1.peak_dead_uncontrolled[0]),
        ("exp1.maxD.unc.adult", 1_460_500, t1.peak_dead_uncontrolled[1]),
        ("exp1.maxD.unc.old", 1_665_600, t1.peak_dead_uncontrolled[2]),
        ("exp2.maxI.unc", 6_574_100, t2.peak_infected_uncontrolled[0]),
        ("exp2.maxA.unc", 9_644_000, t2.peak_asymptomatic_uncontrolled[0]),
        ("exp2.maxD.unc", 3_156_800, t2.peak_dead_uncontrolled[0]),
    ]
    return entries


def test_published_table_completeness(exp1, exp2):
    entries = _manifest(exp1, exp2)
    labels = [label for label, _, _ in entries]
    assert len(labels) == len(set(labels)), "manifest maps two cells to one field"
    for label, published, built in entries:
        assert float(built) == pytest.approx(float(published), rel=1e-12), label


# --- config round trip ------------------------------------------------------


def _assert_calibrations_identical(a, b):
    assert a.name == b.name
    assert a.params.group_names == b.params.group_names
    assert a.params.beta == b.params.beta
    assert a.params.population == b.params.population
    for attr in ("gamma", "alpha", "k", "sigma", "mu", "group_share", "u_max"):
        np.testing.assert_array_equal(getattr(a.params, attr), getattr(b.params, attr))
    for attr in (
        "treatment_daily",
        "infection_loss_daily",
        "quarantine_loss_daily",
        "death_cost",
        "recovery_profit_daily",
    ):
        np.testing.assert_array_equal(getattr(a.cost, attr), getattr(b.cost, attr))
    assert a.cost.population == b.cost.population
    assert a.cost.shape == b.cost.shape
    assert a.cost.concave_exponent == b.cost.concave_exponent
    np.testing.assert_array_equal(a.initial, b.initial)
    for attr in (
        "objective_uncontrolled",
        "objective_controlled",
        "peak_infected",
        "peak_asymptomatic",
        "peak_dead",
        "peak_infected_uncontrolled",
        "peak_asymptomatic_uncontrolled",
        "peak_dead_uncontrolled",
    ):
        np.testing.assert_array_equal(
            np.asarray(getattr(a.targets, attr)), np.asarray(getattr(b.targets, attr))
        )


@pytest.mark.parametrize("name", ["exp1", "exp2"])
def test_config_round_trip_is_bit_exact(tmp_path, name):
    calibration = lo.builtin_calibration(name)
    path = tmp_path / f"{name}.cfg"
    lo.save_calibration(calibration, path)
    loaded = lo.load_calibration(path)
    _assert_calibrations_identical(calibration, loaded)
    # a second save of the loaded calibration reproduces the file bytes
    second = tmp_path / f"{name}-again.cfg"
    lo.save_calibration(loaded, second)
    assert path.read_bytes() == second.read_bytes()


def test_sections_round_trip_in_memory(exp1):
    sections = calibration_to_sections(exp1)
    rebuilt = calibration_from_sections(sections)
    _assert_calibrations_identical(exp1, rebuilt)
