"""Grubbs test for a single outlier, and sequential screening built on it."""

from dataclasses import dataclass
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DegenerateDataError, SampleSizeError
from .series import Sample
from .special import student_t_quantile
from .validation import check_sample

DEFAULT_ALPHA = 0.05
MIN_GRUBBS_N = 7


@dataclass(frozen=True)
class GrubbsReport:
    g_statistic: float
    critical: float
    suspect_value: float
    suspect_index: int
    alpha: float
    n: int
    rejected: bool


def grubbs_critical(n, alpha=DEFAULT_ALPHA):
    """Two-sided critical value of the Grubbs statistic for ``n`` observations."""
    if n < 3:
        raise SampleSizeError(f"the Grubbs critical value needs n >= 3, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    t = student_t_quantile(1.0 - alpha / (2.0 * n), n - 2)
    return (n - 1) / math.sqrt(n) * math.sqrt(t * t / (n - 2 + t * t))


def grubbs_test(sample, alpha=DEFAULT_ALPHA, min_n=MIN_GRUBBS_N):
    """Test the observation farthest from the mean.

    ``G = max |x_i - mean| / sd`` with the ``n - 1`` standard deviation; the
    suspect is rejected when ``G`` exceeds :func:`grubbs_critical`.
    """
    sample = sample if isinstance(sample, Sample) else Sample(sample)
    n = sample.n
    if n < min_n:
        raise SampleSizeError(f"the Grubbs test needs at least {min_n} observations, got {n}")
    x = sample.values
    mean = math.fsum(x) / n
    dev = np.abs(x - mean)
    sd = math.sqrt(math.fsum((x - mean) ** 2) / (n - 1))
    if sd == 0.0:
        raise DegenerateDataError("all sample values are identical")
    idx = int(np.argmax(dev))
    g = float(dev[idx]) / sd
    crit = grubbs_critical(n, alpha)
    return GrubbsReport(g, crit, float(x[idx]), idx, alpha, n, g > crit)


def grubbs_filter(sample, alpha=DEFAULT_ALPHA, max_removals=1, min_n=MIN_GRUBBS_N):
    """Remove suspects one at a time while the test rejects them.

    Returns the cleaned sample and every report produced, in order; the last
    report is the first non-rejection unless ``max_removals`` was reached.
    """
    if max_removals < 1:
        raise SampleSizeError(f"max_removals must be at least 1, got {max_removals}")
    sample = sample if isinstance(sample, Sample) else Sample(sample)
    reports = []
    removed = 0
    while removed < max_removals:
        report = grubbs_test(sample, alpha, min_n)
        reports.append(report)
        if not report.rejected:
            break
        sample = sample.without_index(report.suspect_index)
        removed += 1
    return sample, reports


class GrubbsFilter(TransformerMixin, BaseEstimator):
    """Sequential Grubbs screening as a transformer.

    ``fit`` runs :func:`grubbs_filter` and keeps the range of the retained
    observations; ``transform`` drops values outside that range.
    ``fit_transform`` returns exactly the cleaned sample.
    """

    def __init__(self, alpha=DEFAULT_ALPHA, max_removals=1, min_n=MIN_GRUBBS_N):
        self.alpha = alpha
        self.max_removals = max_removals
        self.min_n = min_n

    def fit(self, X, y=None):
        x = check_sample(X, min_samples=self.min_n)
        clean, reports = grubbs_filter(Sample(x), self.alpha, self.max_removals, self.min_n)
        self.reports_ = reports
        self.outliers_ = np.array([r.suspect_value for r in reports if r.rejected])
        self.lower_ = float(clean.values[0])
        self.upper_ = float(clean.values[-1])
        self.clean_ = clean.values
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "clean_")
        x = check_sample(X, min_samples=1)
        return x[(x >= self.lower_) & (x <= self.upper_)]

    def fit_transform(self, X, y=None, **fit_params):
        return np.array(self.fit(X).clean_)
