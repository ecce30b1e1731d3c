"""Node geometry, path loss and per-frame Rayleigh power gains.

Only power gains enter the rate formulas, so a Rayleigh frame is drawn
directly as ``Exp(1)`` multiplied by the path-loss mean (the squared
magnitude of a CN(0, 1) coefficient is unit-mean exponential).

Randomness: ``numpy.random.default_rng(seed)``, i.e. PCG64 seeded through
``SeedSequence(seed)``.  One frame consumes ``2 + N`` standard exponential
variates in the order ``S1-R, S2-R, J1-R, ..., JN-R``, so a topology that
extends another by appending jammers shares the prefix of its draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

FADING_MODES = ("rayleigh", "unit")


class DomainError(ValueError):
    """Input outside the domain where a formula is defined."""


@dataclass(frozen=True)
class NodePosition:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"non-finite node coordinate ({self.x}, {self.y})")

    def distance_to(self, other: NodePosition) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def shifted(self, dx: float, dy: float) -> NodePosition:
        return NodePosition(self.x + dx, self.y + dy)


@dataclass(frozen=True)
class SystemConfig:
    """Physical constants shared by every computation.

    Defaults are the simulation setup used throughout the experiments:
    ``p_max = 10``, unit bandwidth, noise variance 0.01, path-loss
    exponent 2 and unit economic gain per bit.
    """

    noise_power: float = 0.01
    bandwidth: float = 1.0
    power_cap: float = 10.0
    pathloss_exponent: float = 2.0
    rate_gain: float = 1.0

    def __post_init__(self):
        for name in ("noise_power", "bandwidth", "power_cap"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value}")
        if not (math.isfinite(self.pathloss_exponent) and self.pathloss_exponent >= 0):
            raise DomainError(f"pathloss_exponent must be >= 0, got {self.pathloss_exponent}")
        if not (math.isfinite(self.rate_gain) and self.rate_gain >= 0):
            raise DomainError(f"rate_gain must be >= 0, got {self.rate_gain}")

    def with_(self, **changes) -> SystemConfig:
        return replace(self, **changes)


@dataclass(frozen=True)
class Topology:
    source1: NodePosition = NodePosition(-1.0, 0.0)
    source2: NodePosition = NodePosition(1.0, 0.0)
    relay: NodePosition = NodePosition(0.0, 0.0)
    jammers: tuple[NodePosition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "jammers", tuple(self.jammers))
        for label, node in self.nodes():
            if node.distance_to(self.relay) <= 0:
                raise DomainError(f"{label} is co-located with the relay")

    def nodes(self):
        yield "source1", self.source1
        yield "source2", self.source2
        for i, jammer in enumerate(self.jammers):
            yield f"jammer {i}", jammer

    @property
    def num_jammers(self) -> int:
        return len(self.jammers)

    def distances(self) -> np.ndarray:
        """Distances to the relay in draw order (S1, S2, J1..JN)."""
        return np.array([node.distance_to(self.relay) for _, node in self.nodes()])

    def translated(self, dx: float, dy: float) -> Topology:
        return Topology(
            self.source1.shifted(dx, dy),
            self.source2.shifted(dx, dy),
            self.relay.shifted(dx, dy),
            tuple(j.shifted(dx, dy) for j in self.jammers),
        )

    def with_jammers(self, jammers) -> Topology:
        return replace(self, jammers=tuple(jammers))


@dataclass(frozen=True)
class ChannelGains:
    """Power gains to the relay for one fading frame."""

    g_s1r: float
    g_s2r: float
    g_jr: tuple[float, ...] = field(default=())

    def __post_init__(self):
        g_jr = tuple(float(g) for g in np.atleast_1d(np.asarray(self.g_jr, dtype=float)))
        object.__setattr__(self, "g_jr", g_jr)
        object.__setattr__(self, "g_s1r", float(self.g_s1r))
        object.__setattr__(self, "g_s2r", float(self.g_s2r))
        for g in (self.g_s1r, self.g_s2r, *g_jr):
            if not (math.isfinite(g) and g >= 0):
                raise DomainError(f"channel gains must be finite and >= 0, got {g}")

    @property
    def num_jammers(self) -> int:
        return len(self.g_jr)

    @property
    def jammer_array(self) -> np.ndarray:
        return np.asarray(self.g_jr, dtype=float)

    def subset(self, indices) -> ChannelGains:
        """Gains restricted to the listed jammers (sources kept)."""
        return ChannelGains(self.g_s1r, self.g_s2r, tuple(self.g_jr[i] for i in indices))

    def first(self, n: int) -> ChannelGains:
        return self.subset(range(n))


def path_loss_gain(distance: float, exponent: float) -> float:
    """Mean power gain ``distance ** -exponent``."""
    if not distance > 0:
        raise DomainError(f"distance must be > 0, got {distance}")
    return float(distance) ** (-float(exponent))


def sample_gains(topology: Topology, config: SystemConfig, seed: int = 0,
                 fading: str = "rayleigh") -> ChannelGains:
    """Draw the channel power gains of one frame.

    Parameters
    ----------
    topology : Topology
        Node positions; distances are measured to the relay.
    config : SystemConfig
        Supplies the path-loss exponent.
    seed : int
        Non-negative seed.  The same ``(topology, config, seed, fading)``
        always yields the same gains.
    fading : {"rayleigh", "unit"}
        ``unit`` fixes every fading coefficient to 1 (pure path loss).
    """
    if fading not in FADING_MODES:
        raise DomainError(f"unknown fading mode {fading!r}; expected one of {FADING_MODES}")
    mean = np.array([path_loss_gain(d, config.pathloss_exponent) for d in topology.distances()])
    if fading == "rayleigh":
        if int(seed) < 0:
            raise DomainError(f"seed must be non-negative, got {seed}")
        fade = np.random.default_rng(int(seed)).standard_exponential(mean.size)
        gains = mean * fade
    else:
        gains = mean
    return ChannelGains(gains[0], gains[1], tuple(gains[2:]))


def derive_seed(master: int, index: int) -> int:
    """Sub-seed for the ``index``-th draw of a run seeded with ``master``."""
    ss = np.random.SeedSequence([int(master), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
