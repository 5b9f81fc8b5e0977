"""Numerical laboratory for a reaction-diffusion within-host HCV model.

The package integrates the initial-boundary-value problem on an interval,
computes the infection thresholds and equilibria, classifies linear
stability mode by mode, and monitors Lyapunov functionals and invariant
bounds along trajectories.
"""

from .equilibria import (
    EquilibriumReport,
    equilibrium_report,
    infected_equilibrium,
    psi,
    uninfected_equilibrium,
)
from .errors import ConfigError, DomainError, HcvrdError, NotApplicableError, SolverError
from .lyapunov import (
    LyapunovTrace,
    amgm_bracket_product,
    decay_check,
    g1,
    g2,
    l1,
    restriction_ok,
)
from .model import (
    DerivedQuantities,
    ModelParams,
    PointState,
    basic_reproduction_number,
    derived,
    global_extinction_threshold,
    in_sigma,
    incidence,
    lipschitz_constants,
    reaction,
    virion_net_yield,
)
from .runner import RunReport, analyze, run_scenario, sweep
from .scenarios import (
    BUILTIN_SCENARIOS,
    InitialCondition,
    Scenario,
    builtin_scenario,
    format_config,
    load_config,
    load_params,
    parse_config,
    parse_params,
    save_config,
)
from .solver import (
    FieldState,
    Grid1D,
    OdeTrajectory,
    SolverConfig,
    Trajectory,
    comparison_bounds,
    laplacian_neumann,
    ode_reference,
    run,
    step,
)
from .stability import (
    ModeSpectrum,
    StabilityReport,
    classify,
    e0_characteristic,
    estar_characteristic,
    neumann_spectrum,
    routh_hurwitz_cubic,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_SCENARIOS", "ConfigError", "DerivedQuantities", "DomainError",
    "EquilibriumReport", "FieldState", "Grid1D", "HcvrdError",
    "InitialCondition", "LyapunovTrace", "ModeSpectrum", "ModelParams",
    "NotApplicableError", "OdeTrajectory", "PointState", "RunReport",
    "Scenario", "SolverConfig", "SolverError", "StabilityReport", "Trajectory",
    "amgm_bracket_product", "analyze", "basic_reproduction_number",
    "builtin_scenario", "classify", "comparison_bounds", "decay_check",
    "derived", "e0_characteristic", "equilibrium_report",
    "estar_characteristic", "format_config", "g1", "g2",
    "global_extinction_threshold", "in_sigma", "incidence",
    "infected_equilibrium", "l1", "laplacian_neumann", "lipschitz_constants",
    "load_config", "load_params", "neumann_spectrum", "ode_reference",
    "parse_config", "parse_params", "psi", "reaction", "restriction_ok",
    "routh_hurwitz_cubic", "run", "run_scenario", "save_config", "step",
    "sweep", "uninfected_equilibrium", "virion_net_yield",
]
