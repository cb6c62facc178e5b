"""Status-update scheduling over unreliable multiaccess channels with HARQ.

A slot-level Monte-Carlo simulator (compiled kernel with pure-Python
fallback), closed-form moments and bounds for the achievable average age
of information, and a CLI for reproducible experiment sweeps.
"""

from .bounds import (
    BoundsReport,
    Population,
    aoi_lower_bound,
    asymptotic_margin_const,
    asymptotic_slope,
    bounds_report,
    gamma1_const,
    gamma2_bound,
    gap_bound_from_moments,
    grid_population,
    lb_relaxed,
    rrp_exact,
    rrp_upper,
)
from .errors import ContractViolationError, InsufficientSamplesError, ParameterError
from .harq import HarqModel, ModelKind, TerminalChannel, error_prob, sample_attempts, validate
from .moments import (
    Exactness,
    Moment,
    MomentMode,
    MomentSet,
    ek1_closed,
    ek1sq_closed,
    ek2_upper,
    ek2_upper_truncated,
    ek2sq_upper,
    moment_set,
    series_oracle,
)
from .policies import (
    POLICY_IDS,
    Action,
    Packet,
    age_index,
    greedy_max_age,
    rr_persistent,
    rr_type1,
    stationary_randomized,
)
from .sim import (
    SimConfig,
    SimResult,
    TerminalState,
    backend_name,
    inter_delivery_check,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BoundsReport",
    "ContractViolationError",
    "Exactness",
    "HarqModel",
    "InsufficientSamplesError",
    "Moment",
    "MomentMode",
    "MomentSet",
    "ModelKind",
    "POLICY_IDS",
    "Packet",
    "ParameterError",
    "Population",
    "SimConfig",
    "SimResult",
    "TerminalChannel",
    "TerminalState",
    "age_index",
    "aoi_lower_bound",
    "asymptotic_margin_const",
    "asymptotic_slope",
    "backend_name",
    "bounds_report",
    "ek1_closed",
    "ek1sq_closed",
    "ek2_upper",
    "ek2_upper_truncated",
    "ek2sq_upper",
    "error_prob",
    "gamma1_const",
    "gamma2_bound",
    "gap_bound_from_moments",
    "greedy_max_age",
    "grid_population",
    "inter_delivery_check",
    "lb_relaxed",
    "moment_set",
    "rr_persistent",
    "rr_type1",
    "rrp_exact",
    "rrp_upper",
    "run",
    "sample_attempts",
    "series_oracle",
    "stationary_randomized",
    "step",
    "validate",
]
