"""Gini coefficients of zero-truncated Poisson populations.

Exact population values, the pairwise sample estimator with its exact
finite-sample expectation and bias, a plug-in bias-corrected estimator, and
a reproducible Monte Carlo engine with CSV/SVG reporting.
"""

from .specfun import (
    AccuracyError,
    QuadSpec,
    DEFAULT_QUAD,
    bessel_i,
    bessel_i_scaled,
    integrate,
    log_gamma,
    marcum_q1_equal,
    marcum_q1_numeric,
    reg_lower_gamma,
    reg_upper_gamma,
)
from .ztp import (
    DEGENERATE_RATE,
    MleResult,
    Sample,
    ZtpParams,
    cdf,
    h_function,
    laplace_transform,
    log_pmf,
    mean,
    mle,
    pmf,
    sample,
    size_biased_pmf,
    solve_rate_for_mean,
)
from .gini import (
    GiniReport,
    bias,
    estimate,
    expected_g_diag,
    expected_gini,
    gini_population,
    gini_sample,
    prob_equal,
    prob_less,
    r1,
    r1_via_marcum,
    r_infinity,
)
from .simulate import (
    DEFAULT_MASTER_SEED,
    SimCellSummary,
    SimConfig,
    SimulationError,
    cell_seed,
    mse,
    relative_bias,
    run_cell,
    run_simulation,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "QuadSpec",
    "DEFAULT_QUAD",
    "bessel_i",
    "bessel_i_scaled",
    "integrate",
    "log_gamma",
    "marcum_q1_equal",
    "marcum_q1_numeric",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "DEGENERATE_RATE",
    "MleResult",
    "Sample",
    "ZtpParams",
    "cdf",
    "h_function",
    "laplace_transform",
    "log_pmf",
    "mean",
    "mle",
    "pmf",
    "sample",
    "size_biased_pmf",
    "solve_rate_for_mean",
    "GiniReport",
    "bias",
    "estimate",
    "expected_g_diag",
    "expected_gini",
    "gini_population",
    "gini_sample",
    "prob_equal",
    "prob_less",
    "r1",
    "r1_via_marcum",
    "r_infinity",
    "DEFAULT_MASTER_SEED",
    "SimCellSummary",
    "SimConfig",
    "SimulationError",
    "cell_seed",
    "mse",
    "relative_bias",
    "run_cell",
    "run_simulation",
    "__version__",
]
