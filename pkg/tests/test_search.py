import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relaysec.search import golden_section_max, scan_points, scan_refine_max


@given(st.floats(0.05, 9.95))
@settings(max_examples=100, deadline=None)
def test_golden_finds_parabola_peak(x0):
    best = golden_section_max(lambda x: -(x - x0) ** 2, 0.0, 10.0, 1e-9)
    assert abs(best.x - x0) < 1e-8


def test_golden_degenerate_bracket():
    assert golden_section_max(lambda x: x, 1.0, 1.0, 1e-9).x == 1.0


def test_scan_points_layout():
    xs = scan_points(10.0)
    assert xs.size == 64 and xs[0] == 0.0 and xs[-1] == pytest.approx(10.0)
    assert xs[1] == pytest.approx(1e-5)
    assert np.all(np.diff(xs) > 0)


def test_scan_refine_boundaries():
    assert scan_refine_max(lambda x: -x, 10.0).x == 0.0
    assert scan_refine_max(lambda x: x, 10.0).x == 10.0


def test_scan_refine_tie_goes_to_smaller_argument():
    assert scan_refine_max(lambda x: np.zeros_like(x), 10.0).x == 0.0


def test_polish_reaches_machine_precision():
    x0 = math.pi / 2
    best = scan_refine_max(lambda x: -(x - x0) ** 2, 10.0, slope=lambda x: -2 * (x - x0))
    assert best.x == pytest.approx(x0, rel=1e-14)


def test_bimodal_picks_global():
    # both peaks wider than the log-scan spacing
    f = lambda x: np.exp(-((x - 1) / 0.5) ** 2) + 2 * np.exp(-((x - 7) / 1.5) ** 2)  # noqa: E731
    assert scan_refine_max(f, 10.0).x == pytest.approx(7.0, abs=1e-6)
