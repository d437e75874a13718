"""Special functions for the Gauss-Laplace density and the Grubbs critical value.

Only what the rest of the package needs: log-gamma, the regularized
incomplete beta function, and the Student-t distribution (cdf, pdf and
quantile).  All functions take and return plain floats.
"""

import math

from .exceptions import DomainError

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 100_000


def ln_gamma(x):
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"ln_gamma requires a finite positive argument, got {x!r}")
    return math.lgamma(x)


def gamma(x):
    """Gamma function for ``x > 0``; overflows to ``inf`` past ~171.6."""
    lg = ln_gamma(x)
    return math.exp(lg) if lg < 709.0 else math.inf


def _beta_cf(a, b, x):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def reg_inc_beta(a, b, x):
    """Regularized incomplete beta function ``I_x(a, b)``.

    Evaluated with a continued fraction, switching to the complementary
    form ``1 - I_{1-x}(b, a)`` when ``x > (a + 1) / (a + b + 2)`` so the
    fraction always converges quickly.
    """
    a, b, x = float(a), float(b), float(x)
    if not (math.isfinite(a) and a > 0.0 and math.isfinite(b) and b > 0.0):
        raise DomainError(f"reg_inc_beta requires a, b > 0, got a={a!r}, b={b!r}")
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"reg_inc_beta requires 0 <= x <= 1, got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return min(1.0, front * _beta_cf(a, b, x) / a)
    return max(0.0, 1.0 - front * _beta_cf(b, a, 1.0 - x) / b)


def _check_df(df):
    df = float(df)
    if not (math.isfinite(df) and df > 0.0):
        raise DomainError(f"degrees of freedom must be finite and positive, got {df!r}")
    return df


def student_t_cdf(t, df):
    """Cumulative distribution function of Student's t."""
    df = _check_df(df)
    t = float(t)
    if math.isnan(t):
        raise DomainError("student_t_cdf got NaN")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    # one-sided tail mass beyond |t|
    tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def student_t_pdf(t, df):
    """Density of Student's t."""
    df = _check_df(df)
    t = float(t)
    log_norm = (
        math.lgamma(0.5 * (df + 1.0)) - math.lgamma(0.5 * df)
        - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_norm - 0.5 * (df + 1.0) * math.log1p(t * t / df))


def student_t_quantile(prob, df, max_iter=100):
    """Inverse of :func:`student_t_cdf`.

    Solved on the upper half only (the lower half follows by symmetry) with
    a bracketed Newton iteration that falls back to bisection whenever the
    Newton step would leave the bracket.
    """
    prob = float(prob)
    df = _check_df(df)
    if not (0.0 < prob < 1.0):
        raise DomainError(f"student_t_quantile requires 0 < prob < 1, got {prob!r}")
    if prob == 0.5:
        return 0.0
    if prob < 0.5:
        return -student_t_quantile(1.0 - prob, df, max_iter)

    lo, hi = 0.0, 1.0
    while student_t_cdf(hi, df) < prob:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise DomainError(f"quantile {prob!r} is beyond the representable range for df={df}")

    t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        err = student_t_cdf(t, df) - prob
        if err > 0.0:
            hi = t
        else:
            lo = t
        dens = student_t_pdf(t, df)
        t_new = t - err / dens if dens > 0.0 else math.nan
        if not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-14 * max(1.0, abs(t)):
            return t_new
        t = t_new
    return t
