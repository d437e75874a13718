"""Scikit-learn style estimators wrapping the functions in :mod:`glfit.fit`.

Every estimator takes a 1-D array of observations (or a single-column 2-D
array) in ``fit``.  After fitting, ``params_`` holds the :class:`GLParams`
and ``mu_``, ``sigma_`` and ``p_`` expose them individually.
``score_samples`` returns natural-log densities, as in scikit-learn's
density estimators; the base-2 values of the fitting objective live in
``result_``.

>>> from glfit import GLMaxLikelihood, load_bundled
>>> est = GLMaxLikelihood(p=2.0).fit(load_bundled().values)
>>> round(est.mu_, 3)
6.481
"""

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin
from sklearn.utils.validation import check_is_fitted

from . import fit as _fit
from .distribution import log_pdf, sample
from .series import Sample, build_freq
from .validation import check_sample


class _GLEstimator(DensityMixin, BaseEstimator):
    def _store(self, result):
        self.result_ = result
        self.params_ = result.params
        self.mu_ = result.params.mu
        self.sigma_ = result.params.sigma
        self.p_ = result.params.p
        self.converged_ = result.converged
        self.n_iter_ = result.iterations
        self.n_features_in_ = 1
        return self

    def score_samples(self, X):
        """Natural log of the fitted density at each observation."""
        check_is_fitted(self, "params_")
        return np.asarray(log_pdf(check_sample(X, min_samples=1), self.params_))

    def score(self, X, y=None):
        """Total natural-log likelihood of ``X``."""
        return float(np.sum(self.score_samples(X)))

    def sample(self, n_samples=1, random_state=0):
        """Draw from the fitted distribution with the package's seeded generator."""
        check_is_fitted(self, "params_")
        return sample(self.params_, n_samples, random_state)


class _FreqEstimator(_GLEstimator):
    def _freq(self, X):
        return build_freq(Sample(check_sample(X)), self.freq_mode, self.bins)


class GLMaxLikelihood(_GLEstimator):
    """Maximum likelihood fit of ``mu`` and ``sigma`` at a fixed shape ``p``."""

    def __init__(self, p=2.0):
        self.p = p

    def fit(self, X, y=None):
        return self._store(_fit.fit_mle(check_sample(X), self.p))


class GLProfileLikelihood(_GLEstimator):
    """Chooses ``p`` by profiling the maximized likelihood over ``p_grid``.

    The fitted ``profile_`` is a :class:`~glfit.fit.ProfileCurve`; ``p_``
    is its refined maximizer and ``mu_``/``sigma_`` the MLE at that shape.
    """

    def __init__(self, p_grid=_fit.DEFAULT_P_GRID, warm_start=True):
        self.p_grid = p_grid
        self.warm_start = warm_start

    def fit(self, X, y=None):
        x = check_sample(X)
        self.profile_ = _fit.mle_profile(x, self.p_grid, warm_start=self.warm_start)
        nearest = min(self.profile_.points, key=lambda pt: abs(pt.p - self.profile_.p_max))
        init = _fit.GLParams(nearest.mu, nearest.sigma, self.profile_.p_max)
        return self._store(_fit.fit_mle(x, self.profile_.p_max, init=init))


class GLMinDisagreement(_FreqEstimator):
    """Minimizes ``sum |Y - f|**p / f**q`` over a frequency series of the data."""

    def __init__(self, p=2.0, q="0", freq_mode="distinct", bins=None):
        self.p = p
        self.q = q
        self.freq_mode = freq_mode
        self.bins = bins

    def fit(self, X, y=None):
        fs = self._freq(X)
        self.freq_ = fs
        return self._store(_fit.fit_min_disagreement(fs, self.p, self.q))


class GLMoments(_FreqEstimator):
    """Raw-moment matching over a frequency series of the data."""

    def __init__(self, p=2.0, orders=_fit.DEFAULT_MOMENT_ORDERS, fit_p=False,
                 freq_mode="distinct", bins=None):
        self.p = p
        self.orders = orders
        self.fit_p = fit_p
        self.freq_mode = freq_mode
        self.bins = bins

    def _init(self, fs):
        mean, sd = _fit.weighted_stats(fs)
        return _fit.GLParams(mean, sd, self.p)

    def fit(self, X, y=None):
        fs = self._freq(X)
        self.freq_ = fs
        return self._store(_fit.fit_moments(fs, self._init(fs), self.orders, self.fit_p))


class GLCentralMoments(GLMoments):
    """First moment plus central-moment matching over a frequency series."""

    def __init__(self, p=2.0, orders=_fit.DEFAULT_CENTRAL_ORDERS, fit_p=False,
                 freq_mode="distinct", bins=None):
        super().__init__(p, orders, fit_p, freq_mode, bins)

    def fit(self, X, y=None):
        fs = self._freq(X)
        self.freq_ = fs
        return self._store(_fit.fit_central_moments(fs, self._init(fs), self.orders, self.fit_p))


class GLPopulationStats(_GLEstimator):
    """Closed-form mean and sd; ``fit_p`` also inverts the sample kurtosis."""

    def __init__(self, fit_p=False):
        self.fit_p = fit_p

    def fit(self, X, y=None):
        return self._store(_fit.fit_population_stats(check_sample(X), self.fit_p))
