"""Age-stratified SQAIRD epidemic model with optimal lockdown scheduling.

The package simulates a Susceptible-Quarantined-Asymptomatic-Infected-
Recovered-Dead epidemic over age groups and computes cost-minimising
lockdown schedules with a forward-backward sweep driven by Pontryagin's
minimum principle.  Built-in calibrations reproduce the two shipped
policy experiments (targeted vs uniform lockdown); the ``lockdown-opt``
CLI writes CSV trajectories, JSON summaries, and SVG charts.
"""

from .calibration import (
    Calibration,
    HospitalizationProfile,
    ReferenceTargets,
    build_experiment1,
    build_experiment2,
    builtin_calibration,
    load_calibration,
    save_calibration,
    treatment_cost,
)
from .control import (
    Phase,
    PolicyStructure,
    SolveReport,
    SolverConfig,
    adjoint_derivative,
    control_gradient,
    extract_structure,
    hamiltonian,
    integrate_backward,
    optimal_control_pointwise,
    solve_fbsm,
    switching_function,
    terminal_adjoint,
)
from .costs import (
    CostModel,
    CostShape,
    objective,
    running_cost,
    running_cost_series,
    terminal_cost,
)
from .dynamics import (
    Compartment,
    ModelParams,
    TimeGrid,
    derivative,
    integrate_forward,
    system_state,
    total_infectious,
    zero_schedule,
)
from .errors import (
    CalibrationError,
    ConfigFormatError,
    GridMismatchError,
    IntegrationBlowupError,
    InvalidStateError,
    LockdownOptError,
    NonConvergenceError,
)
from .scenarios import (
    ComparisonReport,
    PeakStat,
    ScenarioReport,
    compare,
    run_controlled,
    run_uncontrolled,
)

__version__ = "0.1.0"

__all__ = [
    "Calibration",
    "CalibrationError",
    "Compartment",
    "ComparisonReport",
    "ConfigFormatError",
    "CostModel",
    "CostShape",
    "GridMismatchError",
    "HospitalizationProfile",
    "IntegrationBlowupError",
    "InvalidStateError",
    "LockdownOptError",
    "ModelParams",
    "NonConvergenceError",
    "PeakStat",
    "Phase",
    "PolicyStructure",
    "ReferenceTargets",
    "ScenarioReport",
    "SolveReport",
    "SolverConfig",
    "TimeGrid",
    "adjoint_derivative",
    "build_experiment1",
    "build_experiment2",
    "builtin_calibration",
    "compare",
    "control_gradient",
    "derivative",
    "extract_structure",
    "hamiltonian",
    "integrate_backward",
    "integrate_forward",
    "load_calibration",
    "objective",
    "optimal_control_pointwise",
    "run_controlled",
    "run_uncontrolled",
    "running_cost",
    "running_cost_series",
    "save_calibration",
    "solve_fbsm",
    "switching_function",
    "system_state",
    "terminal_adjoint",
    "terminal_cost",
    "total_infectious",
    "treatment_cost",
    "zero_schedule",
    "__version__",
]
