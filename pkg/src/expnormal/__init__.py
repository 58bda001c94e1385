"""expnormal: the log-|N(0,1)| distribution, exactly and by simulation.

Exact characteristic functions and density of ln|Z| for Z standard normal,
reproducible series samplers for ln|Z| and for the k-th multiplicative root
factors of Z, and statistical suites verifying that the product of k such
factors is again standard normal.
"""

__version__ = "0.1.0"

from .analytic import (
    CFGrid,
    CONSTANTS,
    Constants,
    cf_exact,
    cf_euler_product,
    cf_exponential,
    cf_factor,
    cf_gamma,
    cf_truncated_series,
    density_expnormal,
    log_gamma,
    series_constant_partial,
    std_normal_cdf,
    tail_variance,
)
from .sampling import (
    DEFAULT_CONFIG,
    DegenerateMeanStream,
    RandomStream,
    SampleBatch,
    TruncationConfig,
    make_batch,
    sample_expnormal_direct,
    sample_expnormal_series,
    sample_exponential,
    sample_gamma,
    sample_normal,
    sample_rademacher,
    sample_root_factor,
    sample_root_product,
    sample_uniform,
)
from .verify import (
    CFComparison,
    CheckResult,
    ECDF,
    KSResult,
    SuiteConfig,
    VerificationReport,
    compare_cf,
    density_check,
    empirical_cf,
    kolmogorov_sf,
    ks_one_sample,
    ks_two_sample,
    moment_check,
    run_suite,
)

__all__ = [
    "__version__",
    "CFGrid",
    "CONSTANTS",
    "Constants",
    "cf_exact",
    "cf_euler_product",
    "cf_exponential",
    "cf_factor",
    "cf_gamma",
    "cf_truncated_series",
    "density_expnormal",
    "log_gamma",
    "series_constant_partial",
    "std_normal_cdf",
    "tail_variance",
    "DEFAULT_CONFIG",
    "DegenerateMeanStream",
    "RandomStream",
    "SampleBatch",
    "TruncationConfig",
    "make_batch",
    "sample_expnormal_direct",
    "sample_expnormal_series",
    "sample_exponential",
    "sample_gamma",
    "sample_normal",
    "sample_rademacher",
    "sample_root_factor",
    "sample_root_product",
    "sample_uniform",
    "CFComparison",
    "CheckResult",
    "ECDF",
    "KSResult",
    "SuiteConfig",
    "VerificationReport",
    "compare_cf",
    "density_check",
    "empirical_cf",
    "kolmogorov_sf",
    "ks_one_sample",
    "ks_two_sample",
    "moment_check",
    "run_suite",
]
