"""Fixed-pivot selection and the tools built on it.

Selection of order statistics with counted comparisons, weighted
percentiles, the medcouple, Vervaat perpetuities, reproducible Mersenne
Twister streams, robust multivariate fits and weighted-median filtering.
"""

from .bench import BenchConfig, BenchRow, Distribution, bench_run, dickman_fit, sample, summarize
from .medcouple import medcouple_fast, medcouple_kernel, medcouple_naive
from .mt import MT19937, MTState, RSeedState, mt_from_r_state, mt_from_seed, norm_ppf, r_seed, r_state_from_seed
from .raster import Mask3, Raster, add_salt_pepper, read_pnm, weighted_median_filter, write_pnm
from .robust import (
    EllipsoidEstimate,
    FSState,
    SingularCovarianceError,
    UpdateBackend,
    cstep,
    fs_progression,
    mahalanobis_sq,
    mcd_approx,
)
from .select import ComparisonBreakdown, backward_shuffle, partition_step, select_kth, select_kth_instrumented
from .vervaat import VervaatParams, dickman_cdf, vervaat_pdf_cdf, vervaat_rnd
from .weighted import WeightedResult, weighted_median, weighted_percentile, weighted_percentile_oracle

__version__ = "0.1.0"
