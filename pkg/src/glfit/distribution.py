"""The Gauss-Laplace (generalized normal) family.

Parametrized by location ``mu``, scale ``sigma`` and shape ``p`` such that
``sigma`` is the standard deviation for every ``p``.  ``p = 2`` is the
normal density and ``p = 1`` the Laplace density.
"""

from dataclasses import dataclass
from functools import lru_cache
import math
from typing import NamedTuple

import numpy as np

from ._rng import XorShift64Star
from .exceptions import DomainError

P_MIN = 0.25
P_MAX = 64.0
KURTOSIS_INF = 1.8
_LN2 = math.log(2.0)


def check_shape(p):
    p = float(p)
    if not (P_MIN <= p <= P_MAX):
        raise DomainError(f"shape p={p!r} is outside the supported range [{P_MIN}, {P_MAX}]")
    return p


@dataclass(frozen=True)
class GLParams:
    mu: float
    sigma: float
    p: float

    def __post_init__(self):
        for name in ("mu", "sigma", "p"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.sigma <= 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")
        if self.p <= 0.0:
            raise DomainError(f"p must be positive, got {self.p!r}")


class ShapeConstants(NamedTuple):
    p: float
    scale: float  # (Gamma(1/p) / Gamma(3/p)) ** 0.5
    log_norm: float  # log of the standardized density at zero


@lru_cache(maxsize=512)
def _constants(p):
    lg1 = math.lgamma(1.0 / p)
    lg3 = math.lgamma(3.0 / p)
    log_scale = 0.5 * (lg1 - lg3)
    log_norm = math.log(0.5 * p) - log_scale - lg1
    return ShapeConstants(p, math.exp(log_scale), log_norm)


def shape_constants(p):
    """Cached per-shape constants used by every density evaluation."""
    return _constants(check_shape(p))


def _as_output(values, like):
    return float(values) if np.ndim(like) == 0 else values


def standard_log_pdf(z, p):
    """Natural log of the zero-mean, unit-variance density."""
    c = shape_constants(p)
    z = np.asarray(z, dtype=float)
    out = c.log_norm - np.abs(z / c.scale) ** c.p
    return _as_output(out, z)


def standard_pdf(z, p):
    """Zero-mean, unit-variance Gauss-Laplace density at ``z``."""
    return _as_output(np.exp(standard_log_pdf(z, p)), z)


def log_pdf(x, params):
    x = np.asarray(x, dtype=float)
    out = standard_log_pdf((x - params.mu) / params.sigma, params.p) - math.log(params.sigma)
    return _as_output(out, x)


def pdf(x, params):
    return _as_output(np.exp(log_pdf(x, params)), x)


def log2_pdf(x, params):
    """Base-2 log density, computed without leaving log space."""
    return _as_output(np.asarray(log_pdf(x, params)) / _LN2, x)


def kurtosis(p):
    """Population kurtosis (not excess), ``Gamma(5/p) Gamma(1/p) / Gamma(3/p)**2``."""
    p = check_shape(p)
    return math.exp(math.lgamma(5.0 / p) + math.lgamma(1.0 / p) - 2.0 * math.lgamma(3.0 / p))


def kurtosis_to_p(kappa, max_iter=200):
    """Shape whose kurtosis equals ``kappa``, found by bisection in ``log p``."""
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa <= KURTOSIS_INF:
        raise DomainError(f"kurtosis must exceed {KURTOSIS_INF}, got {kappa!r}")
    k_hi, k_lo = kurtosis(P_MIN), kurtosis(P_MAX)
    if kappa > k_hi or kappa < k_lo:
        raise DomainError(
            f"kurtosis {kappa!r} maps to a shape outside [{P_MIN}, {P_MAX}] "
            f"(supported kurtosis range [{k_lo:.6g}, {k_hi:.6g}])"
        )
    lo, hi = math.log(P_MIN), math.log(P_MAX)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        # kurtosis decreases in p
        if kurtosis(math.exp(mid)) > kappa:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def sample(params, count, seed):
    """Draw ``count`` variates, reproducible from ``seed``.

    Uses ``mu + sigma * s * a * G**(1/p)`` with a random sign ``s``,
    ``G ~ Gamma(1/p, 1)`` and ``a = (Gamma(1/p) / Gamma(3/p))**0.5``.  The
    random stream comes from :class:`glfit._rng.XorShift64Star`.
    """
    if not isinstance(params, GLParams):
        raise DomainError("params must be a GLParams instance")
    count = int(count)
    if count < 1:
        raise DomainError(f"count must be at least 1, got {count}")
    c = shape_constants(params.p)
    rng = XorShift64Star(seed)
    shape = 1.0 / params.p
    out = np.empty(count)
    for i in range(count):
        s = rng.sign()
        out[i] = s * math.exp(rng.log_gamma_variate(shape) / params.p)
    return params.mu + params.sigma * c.scale * out
