"""gaugelab: one integration engine per integral definition, side by side.

The package probes how Darboux, Riemann-Stieltjes, distribution-function
(Lebesgue route), and gauge integrals behave on the same integrands: which
refinement schedules stabilise, which oscillate forever, and what tagged
divisions under a gauge buy that uniform meshes cannot.  A stochastic layer
reuses the same tagged-sum machinery on dyadic Brownian paths.
"""

__version__ = "0.1.0"

from .catalog import (
    conditional_series,
    dirichlet_point,
    entry_names,
    get_entry,
    run_entry,
    step_at,
    zigzag,
)
from .cells import Gauge, Interval, TaggedCell, TaggedDivision
from .divisions import (
    RefinementSchedule,
    bisect_refine,
    delta_fine_division,
    is_fine,
    make_shifted_uniform,
    make_uniform,
    riemann_sum,
)
from .errors import (
    ArgumentError,
    EstimatorFailure,
    GaugeContractError,
    GaugeLabError,
    GaugeTooDemandingError,
    IntegrandEvalError,
    MonotonicityError,
    OracleInconsistencyError,
    ScalarRegimeError,
)
from .exact import IRRATIONAL_SHIFT, SQRT2, QuadExtScalar, is_exact_scalar
from .expr import derive_extrema_oracle, evaluate, parse, to_source
from .integrand import (
    BurkillIntegrand,
    IntervalFactor,
    increments_of,
    length_factor,
    length_squared_factor,
    make_integrand,
)
from .integrators import (
    ConvergenceController,
    DistributionFunction,
    ExtremaOracle,
    darboux_riemann,
    gauge_integrate,
    identity_distribution,
    jump_anchoring_gauge,
    lebesgue_distribution_integrate,
    oscillation_probe,
    rs_integrate,
    singularity_gauge,
    square_distribution,
    step_distribution,
)
from .results import EXIT_CODES, IntegralResult, Status, TraceRow
from .stochastic import (
    DyadicPath,
    PathStatistics,
    brownian_path,
    increment_integral,
    ito_formula_residual,
    ito_formula_residual_time,
    ito_identity_residual,
    ito_sum,
    mc_run,
    path_from_function,
    quadratic_variation,
    refine_path,
    stratonovich_sum,
    total_variation,
)

__all__ = [
    "__version__",
    "ArgumentError",
    "BurkillIntegrand",
    "ConvergenceController",
    "DistributionFunction",
    "DyadicPath",
    "EXIT_CODES",
    "EstimatorFailure",
    "ExtremaOracle",
    "Gauge",
    "GaugeContractError",
    "GaugeLabError",
    "GaugeTooDemandingError",
    "IRRATIONAL_SHIFT",
    "IntegralResult",
    "IntegrandEvalError",
    "Interval",
    "IntervalFactor",
    "MonotonicityError",
    "OracleInconsistencyError",
    "PathStatistics",
    "QuadExtScalar",
    "RefinementSchedule",
    "SQRT2",
    "ScalarRegimeError",
    "Status",
    "TaggedCell",
    "TaggedDivision",
    "TraceRow",
    "bisect_refine",
    "brownian_path",
    "conditional_series",
    "darboux_riemann",
    "delta_fine_division",
    "derive_extrema_oracle",
    "dirichlet_point",
    "entry_names",
    "evaluate",
    "gauge_integrate",
    "get_entry",
    "identity_distribution",
    "increment_integral",
    "increments_of",
    "is_exact_scalar",
    "is_fine",
    "ito_formula_residual",
    "ito_formula_residual_time",
    "ito_identity_residual",
    "ito_sum",
    "jump_anchoring_gauge",
    "lebesgue_distribution_integrate",
    "length_factor",
    "length_squared_factor",
    "make_integrand",
    "make_shifted_uniform",
    "make_uniform",
    "mc_run",
    "oscillation_probe",
    "parse",
    "path_from_function",
    "quadratic_variation",
    "refine_path",
    "riemann_sum",
    "rs_integrate",
    "run_entry",
    "singularity_gauge",
    "square_distribution",
    "step_at",
    "step_distribution",
    "stratonovich_sum",
    "to_source",
    "total_variation",
    "zigzag",
]
