"""Source/jammer Stackelberg pricing game.

The two sources act as a single buyer: given the jammers' unit prices they
buy jamming power to maximize

    U_s = a * (C1s + C2s) - sum_i m_i * p_i^J

with their own powers and the relay power held fixed.  Each jammer sells
at price ``m_i`` and earns ``U_i = m_i * (p_i^J) ** c_i``.  Prices follow
the distributed update

    m_i <- (1 - damping) * m_i + damping * I_i(m),
    I_i(m) = -p_i / (c_i * dp_i/dm_i),

where ``p_i`` is the buyer's best response and the demand slope is a
central finite difference of that best response.  Where the slope is not
informative (the demand is saturated at 0 or ``p_max``, or is flat) the
jammer instead probes ``m_i * (1 +/- 0.05)`` and moves in whichever
direction raises its own utility, staying put when neither does; when
the buyer purchases no jamming from anyone, unsold jammers cut their price
by the probe step instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .channel import ChannelGains, DomainError, SystemConfig
from .rates import (
    LN2,
    PowerAllocation,
    received_jamming,
    secrecy_rates,
    secrecy_sum_scalar,
    secrecy_sum_slope,
    secrecy_sum_terms,
)
from .search import scan_refine_max

DEMAND_MODELS = ("exact", "high_interference")

PROBE_STEP = 0.05
FLAT_SLOPE = -1e-12
REGIME_RATIO = 0.01
INNER_TOL = 1e-8
INNER_MAX_CYCLES = 2000
MAX_BACKTRACKS = 40


@dataclass(frozen=True)
class Market:
    prices: tuple[float, ...]
    cost_exponents: tuple[float, ...] = ()

    def __post_init__(self):
        prices = tuple(float(m) for m in np.atleast_1d(np.asarray(self.prices, dtype=float)))
        exps = self.cost_exponents
        if len(exps) == 0:
            exps = (1.0,) * len(prices)
        exps = tuple(float(c) for c in np.atleast_1d(np.asarray(exps, dtype=float)))
        if len(exps) != len(prices):
            raise DomainError(f"{len(prices)} prices but {len(exps)} cost exponents")
        if any(not (m >= 0 and math.isfinite(m)) for m in prices):
            raise DomainError(f"prices must be finite and >= 0, got {prices}")
        if any(not c >= 1 for c in exps):
            raise DomainError(f"cost exponents must be >= 1, got {exps}")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "cost_exponents", exps)

    @classmethod
    def uniform(cls, n: int, price: float, cost_exponent: float = 1.0) -> Market:
        return cls((price,) * n, (cost_exponent,) * n)

    @property
    def size(self) -> int:
        return len(self.prices)

    def with_prices(self, prices) -> Market:
        return Market(tuple(prices), self.cost_exponents)

    def with_price(self, index: int, price: float) -> Market:
        prices = list(self.prices)
        prices[index] = price
        return Market(tuple(prices), self.cost_exponents)


@dataclass(frozen=True)
class UtilityCoefficients:
    a1: float
    a2: float
    b1: float
    b2: float
    t1: tuple[float, ...]
    t2: tuple[float, ...]
    l1: tuple[float, ...]
    l2: tuple[float, ...]


@dataclass(frozen=True)
class HighInterferenceApprox:
    """Closed-form purchase when one jammer swamps the relay.

    ``d1`` carries the sign of the usual closed-form definition, which is
    negative whenever jamming can help; ``expansion_coefficient`` is the
    coefficient of ``1 / p^J`` obtained by expanding the utility directly
    and has the opposite sign.  ``p_star`` uses ``|d1|`` and is zero when
    the expansion coefficient is not positive.
    """

    d1: float
    p_star: float
    expansion_coefficient: float
    in_regime: bool
    ratios: tuple[float, ...] = ()


class PriceUpdate(NamedTuple):
    price: float
    demand: float
    slope: float
    fallback: bool


@dataclass
class GameTrace:
    price_history: list = field(default_factory=list)
    power_history: list = field(default_factory=list)
    utility_history: list = field(default_factory=list)
    fallback_history: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0

    @property
    def prices(self) -> np.ndarray:
        return self.price_history[-1]

    @property
    def powers(self) -> np.ndarray:
        return self.power_history[-1]

    @property
    def source_utility(self) -> float:
        return float(self.utility_history[-1][0])


# ---------------------------------------------------------------- source side

def _check_dims(gains: ChannelGains, market: Market):
    if market.size != gains.num_jammers:
        raise DomainError(f"{market.size} prices for {gains.num_jammers} jammers")


def source_utility(powers: PowerAllocation, gains: ChannelGains, market: Market,
                   config: SystemConfig) -> float:
    """Buyer utility: rate gain on the secrecy sum minus payments."""
    _check_dims(gains, market)
    report = secrecy_rates(powers, gains, config)
    payment = float(np.dot(market.prices, powers.pj)) if market.size else 0.0
    return config.rate_gain * (report.c1s + report.c2s) - payment


def utility_coefficients(powers: PowerAllocation, gains: ChannelGains,
                         config: SystemConfig) -> UtilityCoefficients:
    p1, p2, pr = powers.p1, powers.p2, powers.pr
    g1, g2 = gains.g_s1r, gains.g_s2r
    if not all(v > 0 for v in (p1, p2, pr, g1, g2)):
        raise DomainError("p1, p2, pr, g_s1r and g_s2r must all be > 0")
    noise = config.noise_power
    s1, s2 = p1 * g1, p2 * g2
    k1 = noise * (s1 + s2 + noise) / (pr * g2)
    k2 = noise * (s1 + s2 + noise) / (pr * g1)
    gj = gains.jammer_array
    return UtilityCoefficients(
        a1=(noise + k1) / s1,
        a2=(noise + k2) / s2,
        b1=(noise + s2) / s1,
        b2=(noise + s1) / s2,
        t1=tuple(noise * gj / (pr * p1 * g2 * g1)),
        t2=tuple(noise * gj / (pr * p2 * g2 * g1)),
        l1=tuple(gj / s1),
        l2=tuple(gj / s2),
    )


def utility_from_coefficients(coeffs: UtilityCoefficients, pj, market: Market,
                              config: SystemConfig) -> float:
    """Buyer utility written in terms of :class:`UtilityCoefficients`.

    Each per-source log ratio is clipped at zero, matching the secrecy
    rate definition.
    """
    pj = np.asarray(pj, dtype=float)
    x1 = coeffs.a1 + float(np.dot(coeffs.t1, pj))
    y1 = coeffs.b1 + float(np.dot(coeffs.l1, pj))
    x2 = coeffs.a2 + float(np.dot(coeffs.t2, pj))
    y2 = coeffs.b2 + float(np.dot(coeffs.l2, pj))
    half = config.bandwidth / 2
    r1 = max(half * (math.log1p(1 / x1) - math.log1p(1 / y1)) / LN2, 0.0)
    r2 = max(half * (math.log1p(1 / x2) - math.log1p(1 / y2)) / LN2, 0.0)
    payment = float(np.dot(market.prices, pj)) if market.size else 0.0
    return config.rate_gain * (r1 + r2) - payment


class _Buyer:
    """Secrecy sum and its slope as functions of received jamming power."""

    def __init__(self, gains: ChannelGains, config: SystemConfig, powers: PowerAllocation):
        if not (powers.pr > 0 and gains.g_s1r > 0 and gains.g_s2r > 0):
            raise DomainError("relay power and source-relay gains must be > 0")
        self.args = (powers.p1, powers.p2, powers.pr)
        self.chan = (gains.g_s1r, gains.g_s2r, config.noise_power, config.bandwidth)
        self.gj = gains.jammer_array
        self.cap = config.power_cap
        self.a = config.rate_gain

    def secrecy(self, jam):
        c1s, c2s = secrecy_sum_terms(*self.args, jam, *self.chan)
        return c1s + c2s

    def slope(self, jam):
        return secrecy_sum_slope(*self.args, jam, *self.chan)

    def best_response(self, i: int, prices: np.ndarray, pj: np.ndarray) -> float:
        g = self.gj[i]
        m = prices[i]
        others = float(np.dot(self.gj, pj) - g * pj[i])
        a = self.a

        def f_vec(x):
            return a * self.secrecy(others + g * x) - m * x

        def f(x):
            return a * secrecy_sum_scalar(*self.args, others + g * x, *self.chan) - m * x

        def slope(x):
            return float(a * g * self.slope(others + g * x) - m)

        return scan_refine_max(f_vec, self.cap, f=f, slope=slope).x

    def best_response_all(self, prices, start=None, tol=INNER_TOL,
                          max_cycles=INNER_MAX_CYCLES) -> np.ndarray:
        prices = np.asarray(prices, dtype=float)
        n = prices.size
        pj = np.zeros(n) if start is None else np.array(start, dtype=float)
        if n == 0:
            return pj
        for _ in range(max_cycles):
            previous = pj.copy()
            for i in range(n):
                pj[i] = self.best_response(i, prices, pj)
            if n == 1 or np.max(np.abs(pj - previous)) < tol:
                break
        return pj

    def utility(self, prices, pj) -> float:
        jam = float(np.dot(self.gj, pj)) if len(pj) else 0.0
        payment = float(np.dot(prices, pj)) if len(pj) else 0.0
        return float(self.a * self.secrecy(jam)) - payment


def _powers(config: SystemConfig, powers: PowerAllocation | None, n: int) -> PowerAllocation:
    if powers is None:
        return PowerAllocation.full(config, (0.0,) * n)
    if len(powers.pj) != n:
        return powers.with_jamming((0.0,) * n)
    return powers


def source_best_response(jammer_index: int, gains: ChannelGains, market: Market,
                         powers_fixed: PowerAllocation | None, config: SystemConfig) -> float:
    """Jamming power the buyer purchases from one jammer, others held fixed.

    ``powers_fixed`` supplies ``p1, p2, p_r`` and the other jammers'
    current powers (defaults: everything at the cap, other jammers off).
    """
    _check_dims(gains, market)
    powers = _powers(config, powers_fixed, gains.num_jammers)
    buyer = _Buyer(gains, config, powers)
    return buyer.best_response(jammer_index, np.asarray(market.prices), np.asarray(powers.pj))


def best_response_all(gains: ChannelGains, market: Market, powers_fixed: PowerAllocation | None,
                      config: SystemConfig, start=None) -> np.ndarray:
    """Buyer's joint purchase: cyclic best responses in jammer order until
    the power vector moves less than ``1e-8``."""
    _check_dims(gains, market)
    powers = _powers(config, powers_fixed, gains.num_jammers)
    return _Buyer(gains, config, powers).best_response_all(market.prices, start)


def high_interference_best_response(gains: ChannelGains, market: Market,
                                    powers_fixed: PowerAllocation | None,
                                    config: SystemConfig,
                                    jammer_index: int = 0) -> HighInterferenceApprox:
    """Closed-form purchase from one dominant jammer (advisory regime check)."""
    _check_dims(gains, market)
    powers = _powers(config, powers_fixed, gains.num_jammers)
    p1, p2, pr = powers.p1, powers.p2, powers.pr
    g1, g2 = gains.g_s1r, gains.g_s2r
    gj = gains.g_jr[jammer_index]
    m = market.prices[jammer_index]
    noise = config.noise_power
    if not gj > 0:
        raise DomainError("designated jammer has zero gain")
    scale = config.rate_gain * config.bandwidth / (2 * LN2)
    s1, s2 = p1 * g1, p2 * g2
    d1 = scale * ((1 - pr * g2 / noise) * s1 / gj + (1 - pr * g1 / noise) * s2 / gj)
    expansion = -d1
    if expansion > 0:
        p_star = config.power_cap if m <= 0 else min(math.sqrt(abs(d1) / m), config.power_cap)
    else:
        p_star = 0.0
    rx = p_star * gj
    with np.errstate(divide="ignore"):
        ratios = (noise / s1 if s1 > 0 else math.inf,
                  noise / s2 if s2 > 0 else math.inf,
                  s1 / rx if rx > 0 else math.inf,
                  s2 / rx if rx > 0 else math.inf)
    in_regime = all(r <= REGIME_RATIO for r in ratios)
    return HighInterferenceApprox(d1, p_star, expansion, in_regime, ratios)


# ---------------------------------------------------------------- jammer side

def jammer_utility(jammer_index: int, market: Market, power: float) -> float:
    if power < 0:
        raise DomainError(f"jamming power must be >= 0, got {power}")
    return market.prices[jammer_index] * power ** market.cost_exponents[jammer_index]


def _demand_function(gains, market, powers, config, demand, start):
    """Return ``q(i, prices) -> purchased power from jammer i``."""
    if demand not in DEMAND_MODELS:
        raise DomainError(f"unknown demand model {demand!r}")
    if demand == "high_interference":
        def q(i, prices):
            return high_interference_best_response(
                gains, market.with_prices(prices), powers, config, jammer_index=i).p_star
        return q

    buyer = _Buyer(gains, config, powers)
    if start is None:
        start = buyer.best_response_all(market.prices)
    current = np.asarray(start, dtype=float)

    def q(i, prices):
        # the other jammers' powers stay at their current purchase
        return buyer.best_response(i, np.asarray(prices, dtype=float), current)
    return q


def _update_with(q: Callable, i: int, market: Market, cap: float,
                 idle: bool = False, safeguard: bool = False) -> PriceUpdate:
    prices = np.array(market.prices)
    m = prices[i]
    c = market.cost_exponents[i]
    p = q(i, prices)
    h = max(1e-4 * m, 1e-8)
    up, down = prices.copy(), prices.copy()
    up[i] = m + h
    down[i] = max(m - h, 0.0)
    slope = (q(i, up) - q(i, down)) / (up[i] - down[i])
    at_boundary = p <= 0.0 or p >= cap
    if not at_boundary and slope < FLAT_SLOPE:
        target = -p / (c * slope)
        if safeguard:
            target = _backtrack(q, i, prices, target, c, m * p ** c)
        return PriceUpdate(target, p, slope, False)

    current = m * p ** c
    best_price, best_value = m, current
    for factor in (1 + PROBE_STEP, 1 - PROBE_STEP):
        trial = prices.copy()
        trial[i] = m * factor
        value = trial[i] * q(i, trial) ** c
        if value > best_value:
            best_price, best_value = trial[i], value
    if idle and best_value <= 0.0:
        # nobody buys any jamming: unsold jammers cut their price
        best_price = m * (1 - PROBE_STEP)
    return PriceUpdate(best_price, p, slope, True)


def _backtrack(q, i, prices, target, c, current):
    # halve the step toward the current price until the jammer's own
    # utility does not drop; demand can jump to zero past a threshold
    m = prices[i]
    trial = prices.copy()
    for _ in range(MAX_BACKTRACKS):
        trial[i] = target
        if target * q(i, trial) ** c >= current:
            return target
        target = m + 0.5 * (target - m)
    return m


def price_update(jammer_index: int, market: Market, gains: ChannelGains,
                 powers_fixed: PowerAllocation | None, config: SystemConfig, *,
                 demand: str = "exact", start=None) -> PriceUpdate:
    """One undamped price update ``I_i(m)`` for jammer ``jammer_index``.

    ``demand="exact"`` differentiates the buyer's numerical best response
    to this jammer with the other jammers' powers held at ``start`` (the
    buyer's joint purchase when ``start`` is None);
    ``"high_interference"`` differentiates the closed-form purchase
    instead.  When ``start`` buys no jamming at all and no probe
    helps, the price is cut by 5%.
    """
    _check_dims(gains, market)
    powers = _powers(config, powers_fixed, gains.num_jammers)
    q = _demand_function(gains, market, powers, config, demand, start)
    return _update_with(q, jammer_index, market, config.power_cap, _idle(start))


def price_update_vector(market: Market, gains: ChannelGains, powers_fixed, config, *,
                        demand: str = "exact", start=None) -> list[PriceUpdate]:
    """``I(m)`` for every jammer, all evaluated at the same price vector."""
    _check_dims(gains, market)
    powers = _powers(config, powers_fixed, gains.num_jammers)
    q = _demand_function(gains, market, powers, config, demand, start)
    idle = _idle(start)
    return [_update_with(q, i, market, config.power_cap, idle) for i in range(market.size)]


def _idle(pj) -> bool:
    return pj is not None and not np.any(np.asarray(pj, dtype=float) > 0)


# ---------------------------------------------------------------- dynamics

def _relative_change(new, old, floor):
    scale = np.maximum(np.maximum(np.abs(new), np.abs(old)), floor)
    return float(np.max(np.abs(new - old) / scale)) if new.size else 0.0


def run_stackelberg(gains: ChannelGains, config: SystemConfig, market_init: Market,
                    powers_fixed: PowerAllocation | None = None, *, damping: float = 0.5,
                    tol: float = 1e-6, max_iter: int = 500,
                    demand: str = "exact") -> GameTrace:
    """Iterate buyer best responses and damped price updates to a fixed point.

    Convergence requires both the largest relative price change and the
    largest relative change of the purchased powers to fall below ``tol``.
    A run that hits ``max_iter`` is returned with ``converged=False``.
    """
    _check_dims(gains, market_init)
    if not 0 < damping <= 1:
        raise DomainError(f"damping must lie in (0, 1], got {damping}")
    powers = _powers(config, powers_fixed, gains.num_jammers)
    buyer = _Buyer(gains, config, powers)
    exps = np.asarray(market_init.cost_exponents)
    prices = np.asarray(market_init.prices, dtype=float)
    trace = GameTrace()

    def record(prices, pj, flags):
        trace.price_history.append(prices.copy())
        trace.power_history.append(pj.copy())
        trace.utility_history.append(
            np.concatenate(([buyer.utility(prices, pj)], prices * pj ** exps)))
        trace.fallback_history.append(tuple(flags))

    pj = _purchase(buyer, gains, market_init, powers, config, demand, None)
    record(prices, pj, ())
    if prices.size == 0:
        trace.converged = True
        return trace

    power_floor = 1e-12 * config.power_cap
    for t in range(max_iter):
        market = market_init.with_prices(prices)
        q = _demand_function(gains, market, powers, config, demand, pj)
        idle = _idle(pj)
        updates = [_update_with(q, i, market, config.power_cap, idle, safeguard=True)
                   for i in range(prices.size)]
        target = np.array([u.price for u in updates])
        new_prices = (1 - damping) * prices + damping * target
        new_pj = _purchase(buyer, gains, market.with_prices(new_prices), powers, config,
                           demand, pj)
        price_change = _relative_change(new_prices, prices, 1e-300)
        power_change = _relative_change(new_pj, pj, power_floor)
        prices, pj = new_prices, new_pj
        record(prices, pj, [u.fallback for u in updates])
        trace.iterations = t + 1
        if price_change < tol and power_change < tol:
            trace.converged = True
            break
    return trace


def _purchase(buyer, gains, market, powers, config, demand, start):
    if demand == "high_interference":
        return np.array([
            high_interference_best_response(gains, market, powers, config, i).p_star
            for i in range(market.size)])
    return buyer.best_response_all(market.prices, start)


# ---------------------------------------------------------------- diagnostics

class EquilibriumCheck(NamedTuple):
    holds: bool
    source_gain: float
    jammer_gains: tuple[float, ...]


def verify_equilibrium(gains: ChannelGains, config: SystemConfig, market: Market, pj,
                       powers_fixed: PowerAllocation | None = None, *,
                       rel_tol: float = 1e-4, grid: int = 201,
                       price_steps=(-0.05, -0.025, -0.01, 0.01, 0.025, 0.05)) -> EquilibriumCheck:
    """Probe unilateral deviations from ``(market.prices, pj)``.

    Buyer: each jammer's power is moved over a ``grid``-point sweep of
    ``[0, p_max]`` with the others fixed.  Jammer ``i``: its price is scaled
    by ``1 + s`` for each ``s`` in ``price_steps`` and the buyer
    re-optimizes.  Gains are reported relative to the equilibrium utility
    (absolute when that utility is zero).
    """
    _check_dims(gains, market)
    powers = _powers(config, powers_fixed, gains.num_jammers)
    buyer = _Buyer(gains, config, powers)
    pj = np.asarray(pj, dtype=float)
    prices = np.asarray(market.prices, dtype=float)
    base = buyer.utility(prices, pj)
    xs = np.linspace(0.0, config.power_cap, grid)
    best_source = base
    for i in range(pj.size):
        others = float(np.dot(buyer.gj, pj) - buyer.gj[i] * pj[i])
        other_cost = float(np.dot(prices, pj) - prices[i] * pj[i])
        values = buyer.a * buyer.secrecy(others + buyer.gj[i] * xs) - other_cost - prices[i] * xs
        best_source = max(best_source, float(values.max()))
    source_gain = (best_source - base) / max(abs(base), 1e-300) if base else best_source - base

    jammer_gains = []
    for i in range(pj.size):
        c = market.cost_exponents[i]
        current = prices[i] * pj[i] ** c
        best = current
        for s in price_steps:
            trial = prices.copy()
            trial[i] *= 1 + s
            bought = buyer.best_response_all(trial, pj)[i]
            best = max(best, trial[i] * bought ** c)
        jammer_gains.append((best - current) / current if current > 0 else best - current)
    holds = source_gain <= rel_tol and all(g <= rel_tol for g in jammer_gains)
    return EquilibriumCheck(holds, source_gain, tuple(jammer_gains))


class StandardFunctionReport(NamedTuple):
    samples: int
    positivity: float
    monotonicity: float
    scalability: float


def standard_function_diagnostics(gains: ChannelGains, config: SystemConfig, market: Market,
                                  powers_fixed: PowerAllocation | None = None, *,
                                  samples: int = 20, seed: int = 0, price_range=(1e-3, 1.0),
                                  eta: float = 1.5, demand: str = "exact",
                                  rtol: float = 1e-6) -> StandardFunctionReport:
    """Fraction of random price vectors where the update map is positive,
    monotone and scalable.

    Only non-fallback updates count; monotonicity compares ``I(m)`` with
    ``I(m')`` for ``m' = m * U(0.5, 1)`` componentwise and accepts either
    ordering, scalability checks ``eta * I(m) >= I(eta * m)``.
    """
    rng = np.random.default_rng(seed)
    lo, hi = np.log(price_range[0]), np.log(price_range[1])
    counts = np.zeros(3)
    used = 0
    for _ in range(samples):
        m = np.exp(rng.uniform(lo, hi, market.size))
        m_low = m * rng.uniform(0.5, 1.0, market.size)
        runs = [price_update_vector(market.with_prices(v), gains, powers_fixed, config, demand=demand)
                for v in (m, m_low, eta * m)]
        if any(u.fallback for run in runs for u in run):
            continue
        i_m, i_low, i_eta = (np.array([u.price for u in run]) for run in runs)
        used += 1
        counts[0] += bool(np.all(i_m > 0))
        slack = rtol * np.abs(i_m)
        counts[1] += bool(np.all(i_m >= i_low - slack) or np.all(i_m <= i_low + slack))
        counts[2] += bool(np.all(eta * i_m >= i_eta - rtol * np.abs(i_eta)))
    if used == 0:
        return StandardFunctionReport(0, math.nan, math.nan, math.nan)
    return StandardFunctionReport(used, *(counts / used))
