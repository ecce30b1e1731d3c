"""Jammer-free system: feasibility of positive secrecy and optimal powers.

Without jammers the relay power only helps (the objective below grows with
``p_r``), so the relay always transmits at the cap.  The stronger source
also transmits at the cap, and the weaker-gain source's power is the only
free variable: it is the interior stationary point of the objective when
one exists, otherwise the cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelGains, DomainError, SystemConfig
from .rates import LN2, PowerAllocation, secrecy_rates_no_jamming
from .search import golden_section_max

CASES = ("g1_greater", "g2_greater", "equal")
EQUAL_GAIN_RTOL = 1e-12


class InfeasibleChannel(DomainError):
    """No power vector within the caps gives both sources positive secrecy."""


@dataclass(frozen=True)
class NoJamOptimum:
    p1_opt: float
    p2_opt: float
    pr_opt: float
    secrecy_sum: float
    case_tag: str
    objective: float = 0.0
    feasible: bool = True


@dataclass(frozen=True)
class FTilde:
    """Objective value of the jammer-free problem.

    ``clipped`` is set when the point violates the positivity condition on
    the relay power; there the achievable secrecy sum is zero.
    """

    value: float
    secrecy_sum: float
    clipped: bool


def feasible_nonzero_secrecy(gains: ChannelGains, config: SystemConfig) -> bool:
    """True iff some powers within the caps give both sources positive secrecy."""
    g1, g2 = gains.g_s1r, gains.g_s2r
    if not (g1 > 0 and g2 > 0):
        raise DomainError("source-relay gains must be > 0")
    return (g1 + g2) / (g1 * g2) < config.power_cap / config.noise_power


def _f_tilde_value(pr, p1, p2, g1, g2, noise):
    s1 = p1 * g1
    s2 = p2 * g2
    total = s1 + s2 + noise
    k1 = noise * total / (pr * g2)
    k2 = noise * total / (pr * g1)
    return ((1 + s1 / (noise + k1)) * (1 + s2 / (noise + k2))
            / ((1 + s1 / (noise + s2)) * (1 + s2 / (noise + s1))))


def relay_power_threshold(powers: PowerAllocation, gains: ChannelGains,
                          config: SystemConfig) -> float:
    """Relay power above which both jammer-free secrecy rates are positive."""
    g1, g2 = gains.g_s1r, gains.g_s2r
    noise = config.noise_power
    t = (powers.p1 * g1 + powers.p2 * g2 + noise) * noise
    with np.errstate(divide="ignore"):
        return max(t / (powers.p2 * g2 ** 2) if powers.p2 > 0 else math.inf,
                   t / (powers.p1 * g1 ** 2) if powers.p1 > 0 else math.inf)


def f_tilde(powers: PowerAllocation, gains: ChannelGains, config: SystemConfig) -> FTilde:
    """Ratio objective whose base-2 log times ``W/2`` is the secrecy sum.

    Jamming powers in ``powers`` are ignored.
    """
    if not (powers.pr > 0 and gains.g_s1r > 0 and gains.g_s2r > 0):
        raise DomainError("relay power and source-relay gains must be > 0")
    value = float(_f_tilde_value(powers.pr, powers.p1, powers.p2,
                                 gains.g_s1r, gains.g_s2r, config.noise_power))
    clipped = not powers.pr > relay_power_threshold(powers, gains, config)
    rate = config.bandwidth / 2 * max(math.log(value) / LN2, 0.0)
    return FTilde(value, 0.0 if clipped else rate, clipped)


def optimize_no_jammer(gains: ChannelGains, config: SystemConfig,
                       best_effort: bool = False) -> NoJamOptimum:
    """Optimal ``(p1, p2, pr)`` for the jammer-free system.

    Raises :class:`InfeasibleChannel` when the channel cannot support
    positive secrecy for both sources, unless ``best_effort`` is set, in
    which case all powers are returned at the cap with ``feasible=False``.
    """
    cap = config.power_cap
    g1, g2 = gains.g_s1r, gains.g_s2r
    if not feasible_nonzero_secrecy(gains, config):
        msg = (f"(g1 + g2) / (g1 g2) = {(g1 + g2) / (g1 * g2):.6g} is not below "
               f"p_max / sigma^2 = {cap / config.noise_power:.6g}")
        if not best_effort:
            raise InfeasibleChannel(msg)
        c1s, c2s = secrecy_rates_no_jamming(cap, cap, cap, gains, config)
        return NoJamOptimum(cap, cap, cap, c1s + c2s, _case(g1, g2), feasible=False)

    case = _case(g1, g2)
    noise = config.noise_power

    def objective(p1, p2):
        return config.bandwidth / 2 * math.log(_f_tilde_value(cap, p1, p2, g1, g2, noise)) / LN2

    if case == "equal":
        p1 = p2 = cap
    else:
        if case == "g1_greater":
            free = lambda x: objective(x, cap)  # noqa: E731
        else:
            free = lambda x: objective(cap, x)  # noqa: E731
        best = golden_section_max(free, 1e-6 * cap, cap, 1e-9 * cap)
        x = best.x if best.value > free(cap) else cap
        p1, p2 = (x, cap) if case == "g1_greater" else (cap, x)

    c1s, c2s = secrecy_rates_no_jamming(p1, p2, cap, gains, config)
    return NoJamOptimum(p1, p2, cap, c1s + c2s, case, objective=max(objective(p1, p2), 0.0))


def _case(g1, g2):
    if math.isclose(g1, g2, rel_tol=EQUAL_GAIN_RTOL, abs_tol=0.0):
        return "equal"
    return "g1_greater" if g1 > g2 else "g2_greater"
