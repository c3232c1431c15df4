"""Second-order Kuramoto dynamics on strongly connected digraphs.

Simulation of coupled phase oscillators with inertia and frustration,
order-weighted spread diagnostics, sufficient-condition checking and
numerical certification of the exponential frequency-synchronization rate.
"""

from .analysis import (
    CertificateReport,
    DiagnosticsSeries,
    InequalityStat,
    certify_inequalities,
    detect_t_star,
    diagnostics,
    fit_decay_rate,
    order_change_times,
)
from .convex import (
    ConvexWeights,
    eta,
    lower_comb,
    make_weights,
    spread,
    upper_comb,
)
from .digraph import (
    Digraph,
    is_reachable,
    is_strongly_connected,
    neighbors,
    strongly_connected_components,
)
from .energy import (
    Condition,
    ConditionReport,
    TheoryConfig,
    auto_select_c,
    check_conditions,
    diameter,
    energy1,
    energy2,
    lambda_rate,
    lambda_tilde_rate,
)
from .errors import DivergenceError, InfeasibleError, ResolutionError
from .integrator import IntegratorConfig, Trajectory, rk4_step, simulate
from .model import ModelParams, State, acceleration, jerk, rhs

__version__ = "0.1.0"

__all__ = [
    "CertificateReport",
    "Condition",
    "ConditionReport",
    "ConvexWeights",
    "DiagnosticsSeries",
    "Digraph",
    "DivergenceError",
    "InequalityStat",
    "InfeasibleError",
    "IntegratorConfig",
    "ModelParams",
    "ResolutionError",
    "State",
    "TheoryConfig",
    "Trajectory",
    "acceleration",
    "auto_select_c",
    "certify_inequalities",
    "check_conditions",
    "detect_t_star",
    "diagnostics",
    "diameter",
    "energy1",
    "energy2",
    "eta",
    "fit_decay_rate",
    "is_reachable",
    "is_strongly_connected",
    "jerk",
    "lambda_rate",
    "lambda_tilde_rate",
    "lower_comb",
    "make_weights",
    "neighbors",
    "order_change_times",
    "rhs",
    "rk4_step",
    "simulate",
    "spread",
    "strongly_connected_components",
    "upper_comb",
]
