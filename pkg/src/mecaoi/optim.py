"""Projected block-coordinate gradient descent with finite-difference gradients."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import SolverConfig

_MIN_STEP = 1e-14
_MAX_STEP = 1e6


def project_box(x, lo, hi):
    """Clamp ``x`` into ``[lo, hi]`` (scalars or arrays)."""
    if np.ndim(x) == 0:
        return float(min(max(x, lo), hi))
    return np.minimum(np.maximum(x, lo), hi)


def fd_gradient(f, point, coord: int, h: float | None = None, lo=None, hi=None, rel_step: float = 1e-6) -> float:
    """Partial derivative of ``f`` along ``coord``.

    Central difference ``(f(x + h e) - f(x - h e)) / 2h``; one-sided where
    the central stencil would leave ``[lo, hi]``. The default step is
    ``rel_step * max(1, |x|)``. A direction along which ``f`` is constant
    (even constantly infinite) has derivative 0.
    """
    x = np.array(point, dtype=float)
    xi = x[coord]
    if h is None:
        h = rel_step * max(1.0, abs(xi))
    down = lo is None or xi - h >= lo
    up = hi is None or xi + h <= hi

    def at(v):
        y = x.copy()
        y[coord] = v
        return f(y)

    if down and up:
        a, b, span = at(xi + h), at(xi - h), 2 * h
    elif up:
        a, b, span = at(xi + h), at(xi), h
    elif down:
        a, b, span = at(xi), at(xi - h), h
    else:
        return 0.0  # box thinner than the stencil
    # equal values, infinite ones included, mean a flat direction
    return 0.0 if a == b else (a - b) / span


@dataclass(frozen=True)
class DescentResult:
    x: np.ndarray
    cost: float
    converged: bool
    passes: int
    evaluations: int


class _Counted:
    def __init__(self, f):
        self.f = f
        self.n = 0

    def __call__(self, x):
        self.n += 1
        return float(self.f(x))


def _coordinate(f, x, fx, i, lo, hi, gamma, eps, max_iter, rel_step):
    """Projected gradient descent on coordinate ``i`` until the projected
    gradient step ``|P(x - gamma g) - x|`` is at most ``eps``.

    The trial step starts at ``gamma``, doubles after an accepted move and
    halves on a cost increase. The stopping test uses the larger of
    ``gamma`` and the current trial step, so a coordinate on a flat but
    still descending stretch keeps moving.
    """
    step = gamma
    g = None
    for _ in range(max_iter):
        if g is None:
            g = fd_gradient(f, x, i, lo=lo[i], hi=hi[i], rel_step=rel_step)
            if not math.isfinite(g):
                return x, fx, False
            if abs(project_box(x[i] - max(gamma, step) * g, lo[i], hi[i]) - x[i]) <= eps:
                return x, fx, True
        cand = project_box(x[i] - step * g, lo[i], hi[i])
        y = x.copy()
        y[i] = cand
        fy = f(y)
        if fy <= fx:
            x, fx = y, fy
            step = min(2 * step, _MAX_STEP)
            g = None
        else:
            step /= 2
            if step < _MIN_STEP:
                # no descent along the estimated gradient: stationary at
                # the resolution of the finite differences
                return x, fx, True
    return x, fx, False


def block_descent(
    objective, init, lo, hi, cfg: SolverConfig = SolverConfig(),
    eps: float | None = None, gamma: float | None = None,
) -> DescentResult:
    """Minimize ``objective`` over the box ``[lo, hi]`` one coordinate at a time.

    Coordinates are visited in index order, each descended to tolerance
    before moving on. Sweeps repeat until a full sweep moves the point by
    at most ``eps`` in max-norm, so every coordinate ends stationary given
    the others. The returned point is always inside the box.
    """
    eps = cfg.eps2 if eps is None else eps
    gamma = cfg.gamma2 if gamma is None else gamma
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise ValueError("empty box: lo > hi")
    f = _Counted(objective)
    x = project_box(np.asarray(init, dtype=float), lo, hi)
    fx = f(x)
    converged = False
    passes = 0
    while passes < cfg.max_passes:
        passes += 1
        start = x.copy()
        all_ok = True
        for i in range(len(x)):
            x, fx, ok = _coordinate(f, x, fx, i, lo, hi, gamma, eps, cfg.max_inner, cfg.fd_step)
            all_ok &= ok
        if all_ok and np.max(np.abs(x - start)) <= eps:
            converged = True
            break
    return DescentResult(project_box(x, lo, hi), fx, converged, passes, f.n)


def multi_start_descent(objective, lo, hi, cfg: SolverConfig, rng, init=None, eps=None, gamma=None) -> DescentResult:
    """Best of ``cfg.multi_start`` block descents; ``init`` (if given) is
    the first start, the rest are uniform in the box. Ties keep the
    earlier start."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    starts = [] if init is None else [np.asarray(init, dtype=float)]
    while len(starts) < cfg.multi_start:
        starts.append(rng.uniform(lo, hi))
    best = None
    for x0 in starts:
        r = block_descent(objective, x0, lo, hi, cfg, eps, gamma)
        if best is None or (r.converged, -r.cost) > (best.converged, -best.cost):
            best = r
    return best
