"""Intrinsic coupling from surface velocities, and a Love-wave thickness-dispersion surrogate.

The surrogate is an isotropic shear layer (slow) on a half-space (fast).
Its fundamental mode velocity ``v`` solves::

    tan(k h sqrt(v^2/v_l^2 - 1)) = mu_s sqrt(1 - v^2/v_s^2) / (mu_l sqrt(v^2/v_l^2 - 1))

with ``k = 2 pi / lambda``. Feeding it an "open" and a "short" parameter
set gives a k_int^2 versus h/lambda curve; it illustrates the mechanism
only and does not stand in for an anisotropic piezoelectric solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class LayeredStack:
    v_layer: float
    mu_layer: float
    v_sub: float
    mu_sub: float

    def __post_init__(self):
        for name in ("v_layer", "mu_layer", "v_sub", "mu_sub"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v}")
        if not self.v_layer < self.v_sub:
            raise ValueError("a Love wave needs v_layer < v_sub")


@dataclass(frozen=True)
class VelocityPair:
    v_open: float
    v_short: float

    def __post_init__(self):
        if not (self.v_short > 0 and self.v_open > 0):
            raise ValueError("velocities must be positive")
        if self.v_short > self.v_open:
            raise ValueError(f"v_short ({self.v_short}) exceeds v_open ({self.v_open})")


def k_int2(pair: VelocityPair) -> float:
    """(v_open^2 - v_short^2) / v_open^2."""
    return (pair.v_open**2 - pair.v_short**2) / pair.v_open**2


def dispersion_residual(stack: LayeredStack, h_over_lambda: float, v: float) -> float:
    """Love relation multiplied through by cos, scaled by mu_sub; zero at a mode.

    ``mu_l s sin(k h s) - mu_s c cos(k h s)`` with ``s = sqrt(v^2/v_l^2 - 1)``
    and ``c = sqrt(1 - v^2/v_s^2)``. Bounded, so usable as a root check.
    """
    s = math.sqrt(max(v * v / stack.v_layer**2 - 1.0, 0.0))
    c = math.sqrt(max(1.0 - v * v / stack.v_sub**2, 0.0))
    x = 2.0 * math.pi * h_over_lambda * s
    return (stack.mu_layer * s * math.sin(x) - stack.mu_sub * c * math.cos(x)) / stack.mu_sub


def love_velocity(stack: LayeredStack, h_over_lambda: float, rtol: float = 0.0) -> float:
    """Fundamental Love-mode phase velocity by bisection.

    The fundamental root lies where ``k h s`` is still below pi/2, so the
    bracket is (v_layer, min(v_sub, v at k h s = pi/2)). The residual is
    negative at the lower end and positive at the upper end. By default the
    bracket is halved until it cannot shrink further in floating point;
    near the thick-film limit the relation is steep enough that a 1e-10
    relative bracket still leaves residuals around 1e-7.
    """
    if h_over_lambda < 0:
        raise ValueError("h_over_lambda must be >= 0")
    if h_over_lambda == 0:
        return stack.v_sub
    kh = 2.0 * math.pi * h_over_lambda
    lo = stack.v_layer
    hi = min(stack.v_sub, stack.v_layer * math.sqrt(1.0 + (math.pi / (2.0 * kh)) ** 2))
    f_hi = dispersion_residual(stack, h_over_lambda, hi)
    if f_hi <= 0:
        # only at the cutoff point itself: layer too thin to bend the mode
        return hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if dispersion_residual(stack, h_over_lambda, mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def kint2_curve(stack_open: LayeredStack, stack_short: LayeredStack, grid: Iterable[float]) -> list[tuple[float, float]]:
    """k_int^2 at each h/lambda from the open- and short-surface surrogate velocities."""
    out = []
    for h in grid:
        v_o = love_velocity(stack_open, h)
        v_m = love_velocity(stack_short, h)
        out.append((float(h), k_int2(VelocityPair(v_o, v_m))))
    return out
