import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sawkit.peaks import parabolic_peak


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.1, 10), st.floats(-5, 5))
def test_exact_on_parabola(offset, a, c):
    x = np.linspace(0, 10, 11)
    xv = 5 + offset
    y = c - a * (x - xv) ** 2
    px, py = parabolic_peak(x, y, 5)
    assert px == pytest.approx(xv, abs=1e-9)
    assert py == pytest.approx(c, abs=1e-9)


def test_edges_and_flat():
    x = np.arange(5.0)
    y = np.array([3.0, 1, 1, 1, 2])
    assert parabolic_peak(x, y, 0) == (0.0, 3.0)
    assert parabolic_peak(x, y, 4) == (4.0, 2.0)
    assert parabolic_peak(x, y, 2) == (2.0, 1.0)
