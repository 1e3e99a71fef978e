"""Opinion dynamics on signed graphs: structure, switching topologies, simulation."""

from .classification import Reconciliation, classify, limit_functional, reconcile
from .dynamics import (
    GainFunction,
    GainTrace,
    IntegratorConfig,
    Nonlinearity,
    NonlinearitySpec,
    Trajectory,
    arctan_linear,
    cubic_linear,
    gauge_schedule,
    gauge_transform,
    identity,
    integrate,
    integrate_gain_flow,
    integrate_nonlinear_additive,
    make_nonlinearity,
    tabulated,
)
from .errors import (
    CapExceeded,
    DivergenceError,
    GainEvaluationError,
    IntegratorInstability,
    InvalidInput,
    InvalidMatrix,
    InvalidParameter,
    NotApplicable,
    NumericalFailure,
    ScenarioError,
    SignedDynamicsError,
    TrajectoryTooShort,
)
from .outcome import Outcome, OutcomeKind
from .scenario import ScenarioBundle, builtin, load, loads, predict, simulate, verify
from .signed_graph import Schedule, Segment, SignedMatrix, epsilon_skeleton, laplacian, validate, window_integral
from .time_varying import (
    analyze_schedule,
    check_uqsc,
    check_usc,
    cut_balance_constant,
    essential_graph,
    find_window,
    predict_cut_balanced,
    predict_usc,
    type_symmetry_constant,
)
from .topology import (
    has_isb_subgraph,
    hostile_camps,
    in_isolated_sets,
    is_hurwitz,
    is_quasi_strongly_connected,
    is_strongly_connected,
    is_structurally_balanced,
    static_predict,
    strongly_connected_components,
    topology_report,
)

__version__ = "0.1.0"
