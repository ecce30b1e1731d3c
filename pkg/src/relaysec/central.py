"""Centralized baseline: choose every jamming power to maximize the secrecy sum.

No prices are paid here.  The objective depends on the jamming powers only
through the received jamming ``sum_i g_i p_i``, but the search still works
coordinate by coordinate so that it makes no use of that structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelGains, DomainError, SystemConfig, derive_seed
from .rates import PowerAllocation, secrecy_sum_scalar, secrecy_sum_slope, secrecy_sum_terms
from .search import scan_refine_max

MAX_CYCLES = 200
CYCLE_TOL = 1e-10
EFFECTIVE_TOL = 1e-9


@dataclass(frozen=True)
class CentralOptimum:
    pj_opt: tuple[float, ...]
    secrecy_sum: float
    cycles: int = 0


def _sources(powers_sources, config):
    if powers_sources is None:
        cap = config.power_cap
        return cap, cap, cap
    if isinstance(powers_sources, PowerAllocation):
        return powers_sources.p1, powers_sources.p2, powers_sources.pr
    p1, p2, pr = powers_sources
    return float(p1), float(p2), float(pr)


def centralized_optimize(gains: ChannelGains, powers_sources=None,
                         config: SystemConfig | None = None, *, seed: int = 0,
                         start=None, max_cycles: int = MAX_CYCLES) -> CentralOptimum:
    """Jamming powers in ``[0, p_max]^N`` maximizing ``C1s + C2s``.

    Parameters
    ----------
    gains : ChannelGains
    powers_sources : (p1, p2, pr) or PowerAllocation, optional
        Fixed source and relay powers; all at the cap by default.
    config : SystemConfig, optional
    seed : int
        Seeds the two random restarts.
    start : array_like, optional
        An extra starting point, tried after the four standard ones.

    Cyclic coordinate ascent is run from four starts (all zero, all at the
    cap, two uniform random points); each start stops when a full cycle
    gains less than ``1e-10`` or after ``max_cycles`` cycles.
    """
    config = config or SystemConfig()
    p1, p2, pr = _sources(powers_sources, config)
    if not (pr > 0 and gains.g_s1r > 0 and gains.g_s2r > 0):
        raise DomainError("relay power and source-relay gains must be > 0")
    args = (p1, p2, pr)
    chan = (gains.g_s1r, gains.g_s2r, config.noise_power, config.bandwidth)
    gj = gains.jammer_array
    cap = config.power_cap
    n = gj.size

    def total(pj):
        return secrecy_sum_scalar(*args, float(np.dot(gj, pj)) if n else 0.0, *chan)

    if n == 0:
        return CentralOptimum((), total(np.zeros(0)), 0)

    def ascend(pj):
        value = total(pj)
        for cycle in range(1, max_cycles + 1):
            previous = value
            for i in range(n):
                g = gj[i]
                others = float(np.dot(gj, pj) - g * pj[i])

                def f_vec(x, g=g, others=others):
                    c1s, c2s = secrecy_sum_terms(*args, others + g * x, *chan)
                    return c1s + c2s

                def f(x, g=g, others=others):
                    return secrecy_sum_scalar(*args, others + g * x, *chan)

                def slope(x, g=g, others=others):
                    return float(g * secrecy_sum_slope(*args, others + g * x, *chan))

                best = scan_refine_max(f_vec, cap, f=f, slope=slope)
                # never accept a coordinate move that loses value
                if best.value >= total(pj):
                    pj[i] = best.x
            value = total(pj)
            if value - previous < CYCLE_TOL:
                return pj, value, cycle
        return pj, value, max_cycles

    rng = np.random.default_rng(derive_seed(seed, n))
    starts = [np.zeros(n), np.full(n, cap), rng.uniform(0, cap, n), rng.uniform(0, cap, n)]
    if start is not None:
        start = np.clip(np.asarray(start, dtype=float), 0.0, cap)
        if start.shape != (n,):
            raise DomainError(f"start has shape {start.shape}, expected ({n},)")
        starts.append(start)
    best = None
    for start in starts:
        pj, value, cycles = ascend(start.copy())
        if best is None or value > best[1]:
            best = (pj, value, cycles)
    pj, value, cycles = best
    return CentralOptimum(tuple(float(p) for p in pj), float(value), cycles)


def sufficiently_effective(gains: ChannelGains, jammer_index: int, powers_sources=None,
                           config: SystemConfig | None = None, *,
                           tol: float = EFFECTIVE_TOL,
                           full: CentralOptimum | None = None) -> bool:
    """True if jammer ``jammer_index`` alone, at some power in ``(0, p_max]``,
    reaches the secrecy sum of the optimum over all jammers (within ``tol``).

    ``full`` may pass a precomputed all-jammer optimum.
    """
    config = config or SystemConfig()
    if full is None:
        full = centralized_optimize(gains, powers_sources, config)
    alone = centralized_optimize(gains.subset([jammer_index]), powers_sources, config)
    return alone.pj_opt[0] > 0 and alone.secrecy_sum >= full.secrecy_sum - tol
