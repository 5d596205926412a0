"""One-port S/Y conversions and group delay."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .touchstone import FrequencySweep, check_grid

SINGULAR_TOL = 1e-12


class SingularConversionError(ArithmeticError):
    """The bilinear S<->Y map hit its pole (ideal short in S, or z_ref*Y = -1)."""

    def __init__(self, message: str, freq: float):
        self.freq = freq
        super().__init__(f"{message} at f = {freq:.9g} Hz")


@dataclass(frozen=True)
class AdmittanceSweep:
    """Complex admittance Y(f) in siemens on a strictly increasing grid."""

    freqs: np.ndarray
    y: np.ndarray
    z_ref: float = 50.0

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float).reshape(-1)
        y = np.asarray(self.y, dtype=complex).reshape(-1)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z_ref", float(self.z_ref))
        check_grid(freqs, len(y))
        if not self.z_ref > 0:
            raise ValueError(f"z_ref must be positive, got {self.z_ref}")

    def __len__(self) -> int:
        return len(self.freqs)

    @property
    def conductance(self) -> np.ndarray:
        return self.y.real

    @property
    def susceptance(self) -> np.ndarray:
        return self.y.imag

    @property
    def impedance(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / self.y


def s_to_y(sweep: FrequencySweep) -> AdmittanceSweep:
    """Y = (1 - S) / (z_ref (1 + S)), pointwise."""
    den = 1.0 + sweep.s11
    bad = np.flatnonzero(np.abs(den) < SINGULAR_TOL)
    if bad.size:
        raise SingularConversionError("S11 = -1 (ideal short) has no finite admittance", sweep.freqs[bad[0]])
    y = (1.0 - sweep.s11) / (sweep.z_ref * den)
    return AdmittanceSweep(sweep.freqs, y, sweep.z_ref)


def y_to_s(sweep: AdmittanceSweep) -> FrequencySweep:
    """S = (1 - z_ref Y) / (1 + z_ref Y), pointwise."""
    zy = sweep.z_ref * sweep.y
    bad = np.flatnonzero(zy == -1.0)
    if bad.size:
        raise SingularConversionError("z_ref*Y = -1 has no finite reflection", sweep.freqs[bad[0]])
    return FrequencySweep(sweep.freqs, (1.0 - zy) / (1.0 + zy), sweep.z_ref)


def unwrapped_phase(s: np.ndarray) -> np.ndarray:
    # Adjacent-sample jump heuristic: true phase steps between samples must stay below pi.
    return np.unwrap(np.angle(s), discont=math.pi)


def group_delay(sweep: FrequencySweep) -> tuple[np.ndarray, np.ndarray]:
    """Group delay tau(f) = -(1/2pi) dphi/df of S11, in seconds.

    Uses central differences in the interior and one-sided differences at the
    two ends. Returns ``(freqs, tau)``.
    """
    if len(sweep) < 3:
        raise ValueError("group delay needs at least 3 frequency points")
    phase = unwrapped_phase(sweep.s11)
    tau = -np.gradient(phase, sweep.freqs, edge_order=1) / (2.0 * math.pi)
    return sweep.freqs.copy(), tau
