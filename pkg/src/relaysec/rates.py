"""Closed-form capacities and secrecy rates of the two-way AF relay link.

Rates are in bits (base-2 logarithm) per unit bandwidth times ``W``.
Every rate is ``(W / 2) * log2(1 + snr)``, evaluated with ``log1p`` so
that tiny SNRs (deep jamming) keep full relative precision.

Jamming enters every expression only through the total jamming power
received at the relay, ``sum_i p_i^J g_{J_i,R}``; the array kernel
:func:`rate_terms` is written in terms of that scalar so that sweeps and
line searches can broadcast over it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelGains, DomainError, SystemConfig

LN2 = math.log(2.0)


@dataclass(frozen=True)
class PowerAllocation:
    p1: float
    p2: float
    pr: float
    pj: tuple[float, ...] = field(default=())

    def __post_init__(self):
        pj = tuple(float(p) for p in np.atleast_1d(np.asarray(self.pj, dtype=float)))
        object.__setattr__(self, "pj", pj)
        for p in (self.p1, self.p2, self.pr, *pj):
            if not p >= 0:
                raise DomainError(f"powers must be >= 0, got {p}")

    @classmethod
    def full(cls, config: SystemConfig, pj=()) -> PowerAllocation:
        """Sources and relay at the power cap."""
        cap = config.power_cap
        return cls(cap, cap, cap, pj)

    def with_jamming(self, pj) -> PowerAllocation:
        return PowerAllocation(self.p1, self.p2, self.pr, pj)


@dataclass(frozen=True)
class RateReport:
    beta: float
    k1: float
    k2: float
    gamma1: float
    gamma2: float
    c1: float
    c2: float
    c1m: float
    c2m: float
    c1s: float
    c2s: float

    @property
    def secrecy_sum(self) -> float:
        return self.c1s + self.c2s


def _rate(bandwidth, snr):
    return bandwidth / 2 * np.log1p(snr) / LN2


def received_jamming(powers: PowerAllocation, gains: ChannelGains) -> float:
    """Total jamming power at the relay, ``sum_i p_i^J g_{J_i,R}``."""
    if len(powers.pj) != gains.num_jammers:
        raise DomainError(
            f"{len(powers.pj)} jamming powers for {gains.num_jammers} jammers")
    if not powers.pj:
        return 0.0
    return float(np.dot(powers.pj, gains.g_jr))


def rate_terms(p1, p2, pr, jam, g1, g2, noise, bandwidth):
    """Array kernel returning ``(k1, k2, gamma1, gamma2, c1, c2, c1m, c2m)``.

    ``jam`` is the received jamming power at the relay; all arguments
    broadcast.  No validation: callers check ``pr * g1 * g2 > 0``.
    """
    s1 = p1 * g1
    s2 = p2 * g2
    total = s1 + s2 + noise
    k1 = noise * total / (pr * g2)
    k2 = noise * total / (pr * g1)
    gamma1 = s1 / (noise + k1 + noise * jam / (pr * g2))
    gamma2 = s2 / (noise + k2 + noise * jam / (pr * g1))
    c1 = _rate(bandwidth, gamma1)
    c2 = _rate(bandwidth, gamma2)
    c1m = _rate(bandwidth, s1 / (noise + s2 + jam))
    c2m = _rate(bandwidth, s2 / (noise + s1 + jam))
    return k1, k2, gamma1, gamma2, c1, c2, c1m, c2m


def secrecy_sum_terms(p1, p2, pr, jam, g1, g2, noise, bandwidth):
    """``(C1s, C2s)`` as arrays over broadcast inputs."""
    _, _, _, _, c1, c2, c1m, c2m = rate_terms(p1, p2, pr, jam, g1, g2, noise, bandwidth)
    return np.maximum(c1 - c1m, 0.0), np.maximum(c2 - c2m, 0.0)


def secrecy_sum_scalar(p1, p2, pr, jam, g1, g2, noise, bandwidth) -> float:
    """``C1s + C2s`` for scalar inputs (same expressions as :func:`rate_terms`)."""
    s1 = p1 * g1
    s2 = p2 * g2
    total = s1 + s2 + noise
    k1 = noise * total / (pr * g2)
    k2 = noise * total / (pr * g1)
    half = bandwidth / 2
    c1 = half * math.log1p(s1 / (noise + k1 + noise * jam / (pr * g2))) / LN2
    c2 = half * math.log1p(s2 / (noise + k2 + noise * jam / (pr * g1))) / LN2
    c1m = half * math.log1p(s1 / (noise + s2 + jam)) / LN2
    c2m = half * math.log1p(s2 / (noise + s1 + jam)) / LN2
    return max(c1 - c1m, 0.0) + max(c2 - c2m, 0.0)


def secrecy_sum_slope(p1, p2, pr, jam, g1, g2, noise, bandwidth):
    """Derivative of ``C1s + C2s`` with respect to the received jamming power.

    A clipped (zero) secrecy term contributes a zero slope.
    """
    s1 = p1 * g1
    s2 = p2 * g2
    total = s1 + s2 + noise
    scale = bandwidth / (2 * LN2)
    out = 0.0
    for sig, other, g_other, g_self in ((s1, s2, g2, g1), (s2, s1, g1, g2)):
        k = noise * total / (pr * g_other)
        leak = noise / (pr * g_other)
        den = noise + k + leak * jam
        gamma = sig / den
        dgamma = -sig * leak / den**2
        eve_den = noise + other + jam
        eve = sig / eve_den
        deve = -sig / eve_den**2
        active = _rate(bandwidth, gamma) - _rate(bandwidth, eve) > 0
        slope = scale * (dgamma / (1 + gamma) - deve / (1 + eve))
        out = out + np.where(active, slope, 0.0)
    return out


def _check_relay_link(powers: PowerAllocation, gains: ChannelGains):
    if not powers.pr > 0:
        raise DomainError("relay power must be > 0 (relay link unusable)")
    if not (gains.g_s1r > 0 and gains.g_s2r > 0):
        raise DomainError("source-relay gains must be > 0 (relay link unusable)")


def beta_factor(powers: PowerAllocation, gains: ChannelGains, config: SystemConfig) -> float:
    """Relay amplification factor normalizing the forwarded power."""
    rx = powers.p1 * gains.g_s1r + powers.p2 * gains.g_s2r + received_jamming(powers, gains)
    return (rx + config.noise_power) ** -0.5


def eavesdropper_capacities(powers: PowerAllocation, gains: ChannelGains,
                            config: SystemConfig) -> tuple[float, float]:
    """Capacities ``(C1m, C2m)`` of the relay decoding each source."""
    jam = received_jamming(powers, gains)
    s1 = powers.p1 * gains.g_s1r
    s2 = powers.p2 * gains.g_s2r
    noise, w = config.noise_power, config.bandwidth
    return float(_rate(w, s1 / (noise + s2 + jam))), float(_rate(w, s2 / (noise + s1 + jam)))


def legitimate_snrs(powers: PowerAllocation, gains: ChannelGains,
                    config: SystemConfig) -> tuple[float, float, float, float]:
    """SNRs of the end-to-end links, returned as ``(gamma1, gamma2, K1, K2)``.

    ``gamma1`` is the S1 -> S2 SNR seen at S2 after it cancels its own
    signal and the known jamming; ``K1``/``K2`` are the forwarded relay
    noise terms.
    """
    _check_relay_link(powers, gains)
    k1, k2, gamma1, gamma2, *_ = rate_terms(
        powers.p1, powers.p2, powers.pr, received_jamming(powers, gains),
        gains.g_s1r, gains.g_s2r, config.noise_power, config.bandwidth)
    return float(gamma1), float(gamma2), float(k1), float(k2)


def secrecy_rates(powers: PowerAllocation, gains: ChannelGains,
                  config: SystemConfig) -> RateReport:
    """Every capacity, SNR and secrecy quantity for one allocation."""
    _check_relay_link(powers, gains)
    k1, k2, gamma1, gamma2, c1, c2, c1m, c2m = rate_terms(
        powers.p1, powers.p2, powers.pr, received_jamming(powers, gains),
        gains.g_s1r, gains.g_s2r, config.noise_power, config.bandwidth)
    return RateReport(
        beta=beta_factor(powers, gains, config),
        k1=float(k1), k2=float(k2), gamma1=float(gamma1), gamma2=float(gamma2),
        c1=float(c1), c2=float(c2), c1m=float(c1m), c2m=float(c2m),
        c1s=float(max(c1 - c1m, 0.0)), c2s=float(max(c2 - c2m, 0.0)),
    )


def secrecy_rates_no_jamming(p1: float, p2: float, pr: float, gains: ChannelGains,
                             config: SystemConfig) -> tuple[float, float]:
    """Per-source secrecy rates of the jammer-free system.

    Written out directly (no jamming terms at all); with zero jamming power
    :func:`secrecy_rates` must agree with it.
    """
    if not (pr > 0 and gains.g_s1r > 0 and gains.g_s2r > 0):
        raise DomainError("relay power and source-relay gains must be > 0")
    noise, w = config.noise_power, config.bandwidth
    s1 = p1 * gains.g_s1r
    s2 = p2 * gains.g_s2r
    k1 = noise * (s1 + s2 + noise) / (pr * gains.g_s2r)
    k2 = noise * (s1 + s2 + noise) / (pr * gains.g_s1r)
    c1s = max(float(_rate(w, s1 / (noise + k1)) - _rate(w, s1 / (noise + s2))), 0.0)
    c2s = max(float(_rate(w, s2 / (noise + k2)) - _rate(w, s2 / (noise + s1))), 0.0)
    return c1s, c2s
