"""Shared fixtures and an independent reference for the rate formulas.

The reference below is written directly from the textbook forms with
``np.log2`` and no shared code, so tests that compare against it are not
circular.
"""

import numpy as np
import pytest

from relaysec.channel import ChannelGains, SystemConfig


def ref_rates(p1, p2, pr, pj, g1, g2, gj, noise=0.01, w=1.0):
    """Return (c1, c2, c1m, c2m, c1s, c2s) from first principles."""
    jam = float(np.dot(pj, gj)) if len(pj) else 0.0
    k1 = noise * (p1 * g1 + p2 * g2 + noise) / (pr * g2)
    k2 = noise * (p1 * g1 + p2 * g2 + noise) / (pr * g1)
    gamma1 = p1 * g1 / (noise + k1 + noise * jam / (pr * g2))
    gamma2 = p2 * g2 / (noise + k2 + noise * jam / (pr * g1))
    c1 = w / 2 * np.log2(1 + gamma1)
    c2 = w / 2 * np.log2(1 + gamma2)
    c1m = w / 2 * np.log2(1 + p1 * g1 / (noise + p2 * g2 + jam))
    c2m = w / 2 * np.log2(1 + p2 * g2 / (noise + p1 * g1 + jam))
    return c1, c2, c1m, c2m, np.maximum(c1 - c1m, 0.0), np.maximum(c2 - c2m, 0.0)


def ref_secrecy_vec(p1, p2, pr, jam, g1, g2, noise=0.01, w=1.0):
    """Secrecy sum over an array of received jamming powers."""
    jam = np.asarray(jam, dtype=float)
    k1 = noise * (p1 * g1 + p2 * g2 + noise) / (pr * g2)
    k2 = noise * (p1 * g1 + p2 * g2 + noise) / (pr * g1)
    c1 = w / 2 * np.log2(1 + p1 * g1 / (noise + k1 + noise * jam / (pr * g2)))
    c2 = w / 2 * np.log2(1 + p2 * g2 / (noise + k2 + noise * jam / (pr * g1)))
    c1m = w / 2 * np.log2(1 + p1 * g1 / (noise + p2 * g2 + jam))
    c2m = w / 2 * np.log2(1 + p2 * g2 / (noise + p1 * g1 + jam))
    return np.maximum(c1 - c1m, 0) + np.maximum(c2 - c2m, 0)


def random_gains(rng, n_jammers=1, lo=0.05, hi=5.0, jlo=0.05, jhi=20.0):
    g1, g2 = np.exp(rng.uniform(np.log(lo), np.log(hi), 2))
    gj = np.exp(rng.uniform(np.log(jlo), np.log(jhi), n_jammers))
    return ChannelGains(g1, g2, tuple(gj))


@pytest.fixture
def config():
    return SystemConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
