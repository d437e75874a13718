"""Fit the Gauss-Laplace (generalized normal) family to observed data."""

from .distribution import (
    GLParams,
    kurtosis,
    kurtosis_to_p,
    log2_pdf,
    pdf,
    sample,
    standard_pdf,
)
from .estimators import (
    GLCentralMoments,
    GLMaxLikelihood,
    GLMinDisagreement,
    GLMoments,
    GLPopulationStats,
    GLProfileLikelihood,
)
from .fit import (
    FitResult,
    ProfileCurve,
    disagreement,
    fit_central_moments,
    fit_min_disagreement,
    fit_mle,
    fit_moments,
    fit_population_stats,
    mle_profile,
)
from .outliers import GrubbsFilter, grubbs_filter, grubbs_test
from .series import FreqSeries, Sample, build_freq, load_bundled, load_sample, model_freq, stats

__version__ = "0.1.0"
