"""Derivative-free minimizers: Nelder-Mead, golden-section search and a grid oracle."""

from dataclasses import dataclass, field
import itertools
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import BracketError, SampleSizeError

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5
GRID_CAP = 10_000_000
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class ObjectiveSpec:
    """A function of 1 to 3 coordinates plus optional box bounds.

    ``transforms`` tags each coordinate ``"linear"`` or ``"log"``; log-tagged
    coordinates are searched in log space by :func:`nelder_mead` and so stay
    strictly positive.
    """

    evaluate: Callable[[np.ndarray], float]
    arity: int
    lower: Optional[Sequence[float]] = None
    upper: Optional[Sequence[float]] = None
    transforms: Optional[Sequence[str]] = None

    def __post_init__(self):
        if not 1 <= self.arity <= 3:
            raise ValueError(f"arity must be 1, 2 or 3, got {self.arity}")
        if self.transforms is None:
            self.transforms = ("linear",) * self.arity
        self.transforms = tuple(self.transforms)
        bad = set(self.transforms) - {"linear", "log"}
        if len(self.transforms) != self.arity or bad:
            raise ValueError(f"transforms must be {self.arity} tags from linear/log")
        self.lower = self._bound(self.lower, -math.inf)
        self.upper = self._bound(self.upper, math.inf)
        if np.any(self.lower >= self.upper):
            raise ValueError("every lower bound must be below its upper bound")

    def _bound(self, values, default):
        if values is None:
            return np.full(self.arity, default)
        arr = np.array([default if v is None else v for v in values], dtype=float)
        if arr.shape != (self.arity,):
            raise ValueError("bounds need one entry per coordinate")
        return arr

    def __call__(self, point):
        point = np.asarray(point, dtype=float)
        if np.any(point < self.lower) or np.any(point > self.upper):
            return math.inf
        try:
            value = float(self.evaluate(point))
        except (ArithmeticError, ValueError):
            return math.inf
        return value if math.isfinite(value) else math.inf


@dataclass
class MinResult:
    argmin: np.ndarray
    value: float
    iterations: int
    converged: bool
    restarts_used: int = 0
    evaluations: int = field(default=0, compare=False)


class _Transformed:
    """Maps between search space and the caller's coordinates."""

    def __init__(self, spec):
        self.spec = spec
        self.is_log = np.array([t == "log" for t in spec.transforms])
        with np.errstate(divide="ignore"):
            self.lower = np.where(self.is_log, np.log(np.maximum(spec.lower, 0.0)), spec.lower)
            self.upper = np.where(self.is_log, np.log(spec.upper), spec.upper)
        self.evaluations = 0

    def to_search(self, point):
        point = np.asarray(point, dtype=float)
        if np.any(point[self.is_log] <= 0.0):
            raise ValueError("log-tagged coordinates need a positive starting value")
        return np.where(self.is_log, np.log(np.where(self.is_log, point, 1.0)), point)

    def to_user(self, u):
        with np.errstate(over="ignore"):
            return np.where(self.is_log, np.exp(u), u)

    def __call__(self, u):
        u = np.clip(u, self.lower, self.upper)
        point = np.clip(self.to_user(u), self.spec.lower, self.spec.upper)
        if np.any(point[self.is_log] <= 0.0) or not np.all(np.isfinite(point)):
            return math.inf
        self.evaluations += 1
        return self.spec(point)


def _initial_simplex(u0):
    m = u0.size
    simplex = np.tile(u0, (m + 1, 1))
    for i in range(m):
        simplex[i + 1, i] += max(0.05 * abs(u0[i]), 0.05)
    return simplex


def _nm_run(func, u0, lower, upper, ftol, xtol, max_iter):
    simplex = np.clip(_initial_simplex(u0), lower, upper)
    fvals = np.array([func(v) for v in simplex])
    m = u0.size
    it = 0
    converged = False
    while True:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        f_spread = np.max(np.abs(fvals[1:] - fvals[0]))
        x_spread = np.max(np.abs(simplex[1:] - simplex[0]))
        if f_spread < ftol and x_spread < xtol:
            converged = True
            break
        if it >= max_iter:
            break
        it += 1
        centroid = simplex[:m].mean(axis=0)
        worst = simplex[m]
        xr = np.clip(centroid + REFLECT * (centroid - worst), lower, upper)
        fr = func(xr)
        if fr < fvals[0]:
            xe = np.clip(centroid + EXPAND * (xr - centroid), lower, upper)
            fe = func(xe)
            if fe < fr:
                simplex[m], fvals[m] = xe, fe
            else:
                simplex[m], fvals[m] = xr, fr
            continue
        if fr < fvals[m - 1]:
            simplex[m], fvals[m] = xr, fr
            continue
        if fr < fvals[m]:
            xc = centroid + CONTRACT * (xr - centroid)
            fc = func(xc)
            if fc <= fr:
                simplex[m], fvals[m] = xc, fc
                continue
        else:
            xc = centroid + CONTRACT * (worst - centroid)
            fc = func(xc)
            if fc < fvals[m]:
                simplex[m], fvals[m] = xc, fc
                continue
        simplex[1:] = simplex[0] + SHRINK * (simplex[1:] - simplex[0])
        fvals[1:] = [func(v) for v in simplex[1:]]
    best = int(np.argmin(fvals))
    return simplex[best], fvals[best], it, converged


def nelder_mead(spec, init, ftol=1e-10, xtol=1e-9, max_iter=2000, restarts=1):
    """Minimize ``spec`` from ``init`` with the Nelder-Mead simplex.

    The initial simplex offsets each coordinate by ``max(5% of |value|, 0.05)``
    in search space.  After the first run the search is restarted ``restarts``
    times from the best vertex; ``converged`` reflects the final run.
    Spreads are measured in search space, so ``xtol`` is relative for
    log-tagged coordinates.
    """
    if ftol <= 0 or xtol <= 0:
        raise ValueError("ftol and xtol must be positive")
    tr = _Transformed(spec)
    init = np.asarray(init, dtype=float).ravel()
    if init.size != spec.arity:
        raise ValueError(f"init has {init.size} coordinates, spec expects {spec.arity}")
    if np.any(init < spec.lower) or np.any(init > spec.upper):
        raise ValueError("init lies outside the bounds")
    u = tr.to_search(init)
    total_iter = 0
    value = math.inf
    converged = False
    for _ in range(restarts + 1):
        u, value, it, converged = _nm_run(tr, u, tr.lower, tr.upper, ftol, xtol, max_iter)
        total_iter += it
    return MinResult(
        argmin=np.clip(tr.to_user(np.clip(u, tr.lower, tr.upper)), spec.lower, spec.upper),
        value=float(value),
        iterations=total_iter,
        converged=bool(converged),
        restarts_used=restarts,
        evaluations=tr.evaluations,
    )


def golden_section(spec, bracket, tol=1e-6):
    """Golden-section search of a unimodal 1-D objective on ``bracket``."""
    if spec.arity != 1:
        raise ValueError("golden_section needs a one-coordinate objective")
    a, b = map(float, bracket)
    if not a < b:
        raise BracketError(f"bracket must satisfy lo < hi, got ({a}, {b})")
    f = lambda t: spec(np.array([t]))  # noqa: E731
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    it = 0
    while b - a > tol:
        it += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        evals += 1
    x = 0.5 * (a + b)
    return MinResult(np.array([x]), f(x), it, True, 0, evals + 1)


def grid_oracle(spec, ranges):
    """Exhaustive minimum over a rectangular grid.

    ``ranges`` holds one ``(lo, hi, steps)`` triple per coordinate.  Points
    are visited in lexicographic order and only strict improvements replace
    the incumbent, so ties go to the lexicographically smallest point.
    """
    if len(ranges) != spec.arity:
        raise ValueError("one range per coordinate is required")
    axes = []
    total = 1
    for lo, hi, steps in ranges:
        steps = int(steps)
        if steps < 2:
            raise SampleSizeError("each grid axis needs at least 2 steps")
        total *= steps
        axes.append(np.linspace(lo, hi, steps))
    if total > GRID_CAP:
        raise SampleSizeError(f"grid of {total} points exceeds the cap of {GRID_CAP}")
    best_val, best_pt = math.inf, None
    for point in itertools.product(*axes):
        value = spec(np.array(point))
        if value < best_val:
            best_val, best_pt = value, point
    if best_pt is None:
        best_pt = tuple(ax[0] for ax in axes)
    return MinResult(np.array(best_pt), best_val, total, True, 0, total)
