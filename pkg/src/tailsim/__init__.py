"""Power-transform importance sampling for catastrophe reinsurance losses."""

from .distributions import (
    Frequency,
    LognormalParams,
    confidence_radius,
    fit_lognormal,
    inv_normal_cdf_upper,
    lognormal_comp_quantile,
    poisson_comp_quantile,
)
from .engine import (
    ContractMetrics,
    SimulationPlan,
    WeightedYearTable,
    assemble_trials,
    build_event_losses,
    draw_frequencies,
    simulate,
)
from .errors import DomainError, InternalError, QuadratureError, UndefinedRelativeError
from .sampling import (
    PowerTransform,
    SampleMode,
    midpoint_partition,
    permute,
    severity_sample,
    transform_weight,
    uniform_sample,
)
from .stats import (
    MomentEstimates,
    k2_inequality_check,
    sample_improvement,
    simulation_errors,
    variance_gap_quadrature,
    weighted_moments,
)
from .terms import CASE_STUDY_CONTRACTS, Contract, apply_aggregate, apply_occurrence

__version__ = "0.1.0"
