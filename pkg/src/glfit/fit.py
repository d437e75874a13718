"""Estimation of Gauss-Laplace parameters.

Five strategies are provided, each returning a :class:`FitResult`:

* :func:`fit_min_disagreement` minimizes ``sum |Y - f|**p / f**q`` over a
  frequency series;
* :func:`fit_moments` matches raw moments ``sum X**k Y`` and ``sum X**k f``;
* :func:`fit_central_moments` matches the first moment plus central moments;
* :func:`fit_population_stats` is the closed-form mean / sd (and optionally
  kurtosis) estimator;
* :func:`fit_mle` maximizes the base-2 log-likelihood.

:func:`mle_profile` sweeps ``fit_mle`` over a grid of shapes and fits a
quartic in ``log2(p)`` to the resulting curve.
"""

from dataclasses import dataclass, field
import math
from typing import Optional
import warnings

import numpy as np

from .distribution import GLParams, check_shape, kurtosis_to_p, log2_pdf
from .exceptions import DisagreementOverflow, GLFitError, SampleSizeError
from .optimize import ObjectiveSpec, golden_section, nelder_mead
from .series import Sample, model_freq, stats, weighted_stats

METHODS = ("min_disagreement", "moments", "central_moments", "population_stats", "mle")
Q_TAGS = ("0", "1", "p/2", "p")
DEFAULT_MOMENT_ORDERS = (0, 1, 2)
DEFAULT_CENTRAL_ORDERS = (2,)
DEFAULT_P_GRID = tuple(1.0 + 0.25 * i for i in range(13))


@dataclass(frozen=True)
class FitConfig:
    p: float = 2.0
    q: str = "0"
    method: str = "mle"
    freq_mode: str = "distinct"
    bins: Optional[int] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        object.__setattr__(self, "q", normalize_q(self.q))
        check_shape(self.p)

    @property
    def q_value(self):
        return resolve_q(self.q, self.p)


@dataclass(frozen=True)
class FitResult:
    params: GLParams
    objective: float
    method: str
    converged: bool
    iterations: int
    q: Optional[str] = None


@dataclass(frozen=True)
class ProfilePoint:
    p: float
    mu: float
    sigma: float
    mle: float


@dataclass(frozen=True)
class ProfileCurve:
    points: tuple
    quartic: tuple  # c4, c3, c2, c1, c0 of MLE ~ sum c_k * log2(p)**k
    r_squared: float
    p_max: float
    mle_max: float
    poly_p_max: float
    poly_mle_max: float
    failed: tuple = field(default=())

    def predict(self, p):
        """Quartic approximation of the profile at shape(s) ``p``."""
        return np.polyval(self.quartic, np.log2(p))


def normalize_q(q_tag):
    text = str(q_tag).strip().replace(" ", "")
    aliases = {"0": "0", "0.0": "0", "1": "1", "1.0": "1", "p/2": "p/2", "p": "p"}
    if text not in aliases:
        raise ValueError(f"q must be one of {Q_TAGS}, got {q_tag!r}")
    return aliases[text]


def resolve_q(q_tag, p):
    return {"0": 0.0, "1": 1.0, "p/2": 0.5 * p, "p": float(p)}[normalize_q(q_tag)]


def _as_sample(data):
    return data if isinstance(data, Sample) else Sample(data)


def _mu_sigma_spec(p, loss):
    def evaluate(v):
        return loss(GLParams(v[0], v[1], p))

    return ObjectiveSpec(evaluate, arity=2, lower=(None, 0.0), transforms=("linear", "log"))


def _default_init(fs, p):
    mean, sd = weighted_stats(fs)
    return GLParams(mean, sd, p)


# --- minimizing the disagreement --------------------------------------------


def disagreement(fs, params, p, q_tag):
    """``sum |y_i - f_i|**p / f_i**q`` with ``f`` from :func:`model_freq`."""
    q = resolve_q(q_tag, p)
    f = model_freq(fs, params)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        terms = np.abs(fs.y - f) ** p / f ** q
        total = float(np.sum(terms))
    if not math.isfinite(total):
        raise DisagreementOverflow(
            f"disagreement overflowed at mu={params.mu:.6g}, sigma={params.sigma:.6g}, p={p}, q={q_tag}"
        )
    return total


def fit_min_disagreement(fs, p, q_tag="0", init=None, **nm_options):
    p = check_shape(p)
    q_tag = normalize_q(q_tag)
    init = init or _default_init(fs, p)
    spec = _mu_sigma_spec(p, lambda prm: disagreement(fs, prm, p, q_tag))
    res = nelder_mead(spec, (init.mu, init.sigma), **nm_options)
    params = GLParams(res.argmin[0], res.argmin[1], p)
    return FitResult(
        params, disagreement(fs, params, p, q_tag), "min_disagreement",
        res.converged, res.iterations, q_tag,
    )


# --- moment matching ---------------------------------------------------------


def _relative(lhs, rhs):
    lhs = np.asarray(lhs)
    return (lhs - np.asarray(rhs)) / np.maximum(np.abs(lhs), 1.0)


def moment_residuals(fs, params, orders=DEFAULT_MOMENT_ORDERS):
    """Relative residuals of ``sum x**k y = sum x**k f`` for each order ``k``."""
    f = model_freq(fs, params)
    powers = np.array(sorted(orders))
    xk = fs.x[None, :] ** powers[:, None]
    return _relative(xk @ fs.y, xk @ f)


def central_moment_residuals(fs, params, orders=DEFAULT_CENTRAL_ORDERS):
    """First-moment residual followed by central-moment residuals.

    Central moments are taken about the observed weighted mean, so both
    sides share one center: ``sum (x - xbar)**k y = sum (x - xbar)**k f``.
    """
    f = model_freq(fs, params)
    center = float(np.dot(fs.x, fs.y) / np.sum(fs.y))
    powers = np.array(sorted(orders))
    if np.any(powers < 2):
        raise ValueError("central moment orders must be at least 2")
    dk = (fs.x - center)[None, :] ** powers[:, None]
    lhs = np.concatenate(([np.dot(fs.x, fs.y)], dk @ fs.y))
    rhs = np.concatenate(([np.dot(fs.x, f)], dk @ f))
    return _relative(lhs, rhs)


def _fit_equations(fs, params0, residuals, n_equations, fit_p, method, nm_options):
    params0 = params0 or _default_init(fs, 2.0)
    free = 3 if fit_p else 2
    if n_equations < free:
        warnings.warn(
            f"{n_equations} moment equations cannot determine {free} free parameters",
            RuntimeWarning,
            stacklevel=3,
        )

    def loss(params):
        return float(np.sqrt(np.sum(residuals(params) ** 2)))

    if fit_p:
        spec = ObjectiveSpec(
            lambda v: loss(GLParams(*v)), arity=3,
            lower=(None, 0.0, 0.25), upper=(None, None, 64.0),
            transforms=("linear", "log", "log"),
        )
        res = nelder_mead(spec, (params0.mu, params0.sigma, params0.p), **nm_options)
        params = GLParams(*res.argmin)
    else:
        p = check_shape(params0.p)
        res = nelder_mead(_mu_sigma_spec(p, loss), (params0.mu, params0.sigma), **nm_options)
        params = GLParams(res.argmin[0], res.argmin[1], p)
    return FitResult(params, loss(params), method, res.converged, res.iterations)


def fit_moments(fs, params0=None, orders=DEFAULT_MOMENT_ORDERS, fit_p=False, **nm_options):
    """Match raw moments of orders ``orders``; the objective is the residual norm.

    ``params0`` supplies the starting point and, unless ``fit_p`` is set, the
    fixed shape.  Adding ``4`` to ``orders`` is advisable when ``fit_p`` is set.
    """
    orders = tuple(sorted(set(int(k) for k in orders)))
    if any(k < 0 for k in orders):
        raise ValueError("moment orders must be nonnegative")
    return _fit_equations(
        fs, params0, lambda prm: moment_residuals(fs, prm, orders),
        len(orders), fit_p, "moments", nm_options,
    )


def fit_central_moments(fs, params0=None, orders=DEFAULT_CENTRAL_ORDERS, fit_p=False, **nm_options):
    """Match the first moment and central moments of ``orders`` (each >= 2)."""
    orders = tuple(sorted(set(int(k) for k in orders)))
    if not orders or min(orders) < 2:
        raise ValueError("central moment orders must be a nonempty set of integers >= 2")
    return _fit_equations(
        fs, params0, lambda prm: central_moment_residuals(fs, prm, orders),
        len(orders) + 1, fit_p, "central_moments", nm_options,
    )


# --- closed form -------------------------------------------------------------


def fit_population_stats(sample, fit_p=False):
    """Mean and sd (``n - 1`` denominator); shape from the sample kurtosis if ``fit_p``."""
    st = stats(_as_sample(sample))
    p = kurtosis_to_p(st.kurtosis) if fit_p else 2.0
    return FitResult(GLParams(st.mean, st.sd, p), 0.0, "population_stats", True, 0)


# --- maximum likelihood ------------------------------------------------------


def log2_likelihood(values, params):
    """``sum log2 pdf(x_i)``, the quantity :func:`fit_mle` maximizes."""
    return float(np.sum(log2_pdf(np.asarray(values, dtype=float), params)))


def fit_mle(sample, p, init=None, **nm_options):
    """Maximize the base-2 log-likelihood over ``(mu, sigma)`` at fixed ``p``."""
    p = check_shape(p)
    x = _as_sample(sample).values
    if init is None:
        st = stats(_as_sample(sample))
        init = GLParams(st.mean, st.sd, p)
    spec = _mu_sigma_spec(p, lambda prm: -log2_likelihood(x, prm))
    res = nelder_mead(spec, (init.mu, init.sigma), **nm_options)
    params = GLParams(res.argmin[0], res.argmin[1], p)
    return FitResult(params, log2_likelihood(x, params), "mle", res.converged, res.iterations)


def fit_quartic(p, mle):
    """Least-squares quartic in ``log2 p``; returns ``(c4..c0, r_squared)``."""
    lp = np.log2(np.asarray(p, dtype=float))
    mle = np.asarray(mle, dtype=float)
    coeffs = np.polyfit(lp, mle, 4)
    ss_res = float(np.sum((mle - np.polyval(coeffs, lp)) ** 2))
    ss_tot = float(np.sum((mle - mle.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return coeffs, r2


def _quartic_argmax(coeffs, lo, hi):
    # candidates: interior stationary points of the polynomial and both ends
    candidates = [lo, hi]
    for root in np.roots(np.polyder(coeffs)):
        if abs(root.imag) < 1e-12 and lo <= root.real <= hi:
            candidates.append(root.real)
    values = np.polyval(coeffs, candidates)
    best = int(np.argmax(values))
    return candidates[best], float(values[best])


def mle_profile(sample, p_grid=DEFAULT_P_GRID, warm_start=True, tol=1e-4, **nm_options):
    """Profile the maximized log-likelihood over the shape ``p``.

    Each grid point is fitted with :func:`fit_mle` (seeded from the previous
    point when ``warm_start``), a quartic in ``log2 p`` is least-squares
    fitted to the curve, and the true profile maximum is refined by
    golden-section search between the neighbours of the best grid point.
    """
    sample = _as_sample(sample)
    grid = [check_shape(p) for p in p_grid]
    if len(grid) < 6:
        raise SampleSizeError(f"grid too short: need at least 6 shapes, got {len(grid)}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("p_grid must be strictly increasing")

    points, fits, failed = [], [], []
    prev = None
    for p in grid:
        init = GLParams(prev.mu, prev.sigma, p) if (warm_start and prev) else None
        try:
            res = fit_mle(sample, p, init=init, **nm_options)
        except GLFitError as exc:
            failed.append((p, str(exc)))
            continue
        if not math.isfinite(res.objective):
            failed.append((p, "non-finite likelihood"))
            continue
        prev = res.params
        fits.append(res)
        points.append(ProfilePoint(p, res.params.mu, res.params.sigma, res.objective))
    if len(points) < 6:
        raise SampleSizeError(f"only {len(points)} grid points could be fitted; need 6")

    lp = np.log2([pt.p for pt in points])
    mle = np.array([pt.mle for pt in points])
    coeffs, r2 = fit_quartic([pt.p for pt in points], mle)
    poly_lp, poly_val = _quartic_argmax(coeffs, lp[0], lp[-1])

    k = int(np.argmax(mle))
    lo, hi = points[max(k - 1, 0)].p, points[min(k + 1, len(points) - 1)].p
    seed = fits[k].params

    def neg_profile(v):
        return -fit_mle(sample, v[0], init=GLParams(seed.mu, seed.sigma, v[0]), **nm_options).objective

    gs = golden_section(ObjectiveSpec(neg_profile, arity=1), (lo, hi), tol=tol)
    p_max, mle_max = float(gs.argmin[0]), -gs.value
    if mle[k] > mle_max:
        p_max, mle_max = points[k].p, float(mle[k])

    return ProfileCurve(
        points=tuple(points),
        quartic=tuple(float(c) for c in coeffs),
        r_squared=r2,
        p_max=p_max,
        mle_max=mle_max,
        poly_p_max=float(2.0 ** poly_lp),
        poly_mle_max=poly_val,
        failed=tuple(failed),
    )
