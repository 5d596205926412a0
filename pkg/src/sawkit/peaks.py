"""Three-point parabolic refinement of sampled extrema."""
from __future__ import annotations

import numpy as np


def parabolic_peak(x: np.ndarray, y: np.ndarray, i: int) -> tuple[float, float]:
    """Vertex ``(x, y)`` of the parabola through samples ``i-1, i, i+1``.

    End samples and degenerate (collinear) triples return the sample itself.
    On a non-uniform grid the fractional index offset is mapped back to ``x``
    by linear interpolation.
    """
    if i <= 0 or i >= len(y) - 1:
        return float(x[i]), float(y[i])
    y0, y1, y2 = float(y[i - 1]), float(y[i]), float(y[i + 1])
    den = y0 - 2.0 * y1 + y2
    if den == 0 or not np.isfinite(den):
        return float(x[i]), y1
    p = 0.5 * (y0 - y2) / den
    p = min(max(p, -1.0), 1.0)
    xv = float(np.interp(i + p, np.arange(len(x)), x))
    yv = y1 - 0.25 * (y0 - y2) * p
    return xv, yv
