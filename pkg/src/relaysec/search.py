"""Bounded 1-D maximization used by every optimizer in the package."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQ = (3 - math.sqrt(5)) / 2  # 1 / phi^2


class Maximum(NamedTuple):
    x: float
    value: float


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       tol: float) -> Maximum:
    """Golden-section search for the maximum of a unimodal ``f`` on [a, b].

    Stops once the bracket is narrower than ``tol`` and returns the best
    interior probe.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return Maximum(x, f(x))
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQ * h
    d = a + INV_PHI * h
    fc = f(c)
    fd = f(d)
    for _ in range(n):
        if fc >= fd:
            b, d, fd = d, c, fc
            h *= INV_PHI
            c = a + INV_PHI_SQ * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h *= INV_PHI
            d = a + INV_PHI * h
            fd = f(d)
    return Maximum(c, fc) if fc >= fd else Maximum(d, fd)


def scan_points(upper: float, count: int = 64, floor: float = 1e-6) -> np.ndarray:
    """Zero followed by ``count - 1`` log-spaced points up to ``upper``."""
    return np.concatenate(([0.0], np.geomspace(floor * upper, upper, count - 1)))


def scan_refine_max(f_vec: Callable[[np.ndarray], np.ndarray], upper: float, *,
                    f: Callable[[float], float] | None = None,
                    slope: Callable[[float], float] | None = None,
                    count: int = 64, rel_tol: float = 1e-8) -> Maximum:
    """Maximize ``f`` over ``[0, upper]``.

    A log-spaced scan locates the best bracket, golden-section search
    refines inside it, and when ``slope`` (the derivative) changes sign
    across the refined bracket a Brent root-find polishes the stationary
    point to machine precision.  Both boundaries stay candidates; ties go
    to the higher value and then to the smaller argument.

    ``f_vec`` must accept an array and return an array of the same shape;
    ``f`` is an optional faster scalar version of it.
    """
    xs = scan_points(upper, count)
    values = np.asarray(f_vec(xs), dtype=float)
    k = int(np.argmax(values))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, xs.size - 1)]

    if f is None:
        def f(x):
            return float(f_vec(np.array([x]))[0])

    candidates = [Maximum(0.0, float(values[0])), Maximum(float(upper), float(values[-1])),
                  Maximum(float(xs[k]), float(values[k]))]
    if hi > lo:
        tol = rel_tol * upper
        best = golden_section_max(f, lo, hi, tol)
        if slope is not None:
            # a +/- slope bracket is a true local maximum; its value may
            # trail the golden probe by rounding noise only
            best = _polish(f, slope, best.x, lo, hi, tol) or best
        candidates.append(best)
    top = max(c.value for c in candidates)
    return min((c for c in candidates if c.value == top), key=lambda c: c.x)


def _polish(f, slope, x0, lo, hi, tol):
    # widen until the slope brackets a sign change, never leaving [lo, hi]
    width = 2 * tol
    while True:
        left = max(lo, x0 - width)
        right = min(hi, x0 + width)
        if right > left and slope(left) > 0 > slope(right):
            break
        if left <= lo and right >= hi:
            return None
        width *= 16
    root = brentq(slope, left, right, xtol=1e-15 * max(abs(x0), 1e-300),
                  rtol=4 * np.finfo(float).eps)
    return Maximum(root, f(root))
