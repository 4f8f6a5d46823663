"""Vectorized 1-D minimization and uniform-grid cubic interpolation."""

from __future__ import annotations

import math

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_minimize(f, lo, hi, tol=1e-9, scan=64, period=None):
    """Minimize many independent 1-D functions at once.

    ``f`` maps an ``(m, k)`` array of abscissae to an ``(m, k)`` array of
    values, row ``i`` belonging to problem ``i``.  Each problem is first
    scanned on ``scan`` equally spaced points of ``[lo, hi]`` and then
    refined by golden-section search inside the cell around the best scan
    point until the bracket is narrower than ``tol``.

    With ``period`` set, the scan omits the right endpoint, brackets may
    straddle the ends of the interval, and results are wrapped back into
    ``[lo, lo + period)``.

    Returns ``(x, fx)`` as 1-D arrays of length ``m``.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    lo, hi = np.broadcast_arrays(lo, hi)
    m = lo.shape[0]
    if period is None:
        frac = np.linspace(0.0, 1.0, scan)
    else:
        frac = np.arange(scan) / scan
    width = hi - lo
    grid = lo[:, None] + width[:, None] * frac[None, :]
    vals = f(grid)
    j = np.argmin(vals, axis=1)
    rows = np.arange(m)
    best_x = grid[rows, j]
    best_f = vals[rows, j]
    step = width / (scan if period is not None else scan - 1)

    a = best_x - step
    b = best_x + step
    if period is None:
        a = np.maximum(a, lo)
        b = np.minimum(b, hi)

    span = float(np.max(b - a)) if m else 0.0
    n_iter = 0 if span <= tol else int(math.ceil(math.log(tol / span) / math.log(INVPHI)))
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = f(c[:, None])[:, 0]
    fd = f(d[:, None])[:, 0]
    for _ in range(n_iter):
        left = fc < fd
        # left: minimum in [a, d]; otherwise in [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - INVPHI * (b - a)
        new_d = a + INVPHI * (b - a)
        x_new = np.where(left, new_c, new_d)
        f_new = f(x_new[:, None])[:, 0]
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
    x = 0.5 * (a + b)
    fx = f(x[:, None])[:, 0]
    # golden refinement must never lose to the scan point it started from
    worse = best_f < fx
    x = np.where(worse, best_x, x)
    fx = np.where(worse, best_f, fx)
    if period is not None:
        x = lo + np.mod(x - lo, period)
    return x, fx


def golden_scalar(f, lo, hi, tol=1e-9, scan=64, period=None):
    """Scalar convenience wrapper around :func:`golden_minimize`."""

    def fv(x):
        return np.vectorize(f, otypes=[float])(x)

    x, fx = golden_minimize(fv, [lo], [hi], tol=tol, scan=scan, period=period)
    return float(x[0]), float(fx[0])


class UniformGrid:
    """``s`` linearly spaced credulity samples on [0, 1]."""

    def __init__(self, s: int):
        s = int(s)
        if s < 5 or s % 2 == 0:
            raise ValueError(f"grid size s must be odd and >= 5, got {s}")
        self.s = s
        self.h = 1.0 / (s - 1)
        self.points = np.linspace(0.0, 1.0, s)
        self.mid = (s - 1) // 2

    def __repr__(self):
        return f"UniformGrid(s={self.s})"

    def stencil(self, x):
        """Indices and Lagrange weights of the 4-point cubic stencil at ``x``.

        The stencil is the two samples either side of ``x``; near the ends it
        is shifted inward so every node lies on the grid.
        """
        t = np.clip(np.asarray(x, dtype=float), 0.0, 1.0) * (self.s - 1)
        i = np.clip(np.floor(t).astype(np.int64), 1, self.s - 3)
        u = t - i
        um1 = u - 1.0
        um2 = u - 2.0
        up1 = u + 1.0
        w = (
            -u * um1 * um2 / 6.0,
            up1 * um1 * um2 / 2.0,
            -up1 * u * um2 / 2.0,
            up1 * u * um1 / 6.0,
        )
        return i - 1, w

    def interpolate(self, table, x, lo=None, hi=None):
        """Cubic interpolation of sampled ``table`` at credulities ``x``.

        Results are clipped to ``[lo, hi]`` when bounds are given.
        """
        i0, w = self.stencil(x)
        out = (w[0] * table[i0] + w[1] * table[i0 + 1]
               + w[2] * table[i0 + 2] + w[3] * table[i0 + 3])
        if lo is not None or hi is not None:
            out = np.clip(out, lo, hi)
        return out
