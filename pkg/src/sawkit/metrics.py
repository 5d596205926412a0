"""Resonator figures extracted from sweeps and fitted models.

Covers series/parallel resonance, the (pi^2/8) coupling estimate, the
3 dB series Q, the Bode-Q curve and its maximum on a fitted model, the
figure of merit, a census of spurious modes between f_s and f_p, and the
1 dB compression point of a power sweep.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .mbvd import COUPLING_FACTOR, MbvdModel, admittance
from .network import AdmittanceSweep, group_delay, s_to_y, y_to_s
from .peaks import parabolic_peak
from .touchstone import FrequencySweep

Q_MAX_POINTS = 2001
SPURIOUS_PROMINENCE = 0.01  # fraction of G(f_s)


class ExtractionError(ValueError):
    """The sweep does not contain the feature an extraction needs."""


class NoResonanceError(ExtractionError):
    pass


class BandEdgeError(ExtractionError):
    """A feature needed for extraction lies outside the measured band."""


@dataclass(frozen=True)
class ResonatorMetrics:
    f_s: float
    f_p: float
    kt2: float
    q_series: float
    q_max: float
    fom: float
    spurious: tuple[tuple[float, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "f_s": self.f_s,
            "f_p": self.f_p,
            "kt2": self.kt2,
            "q_series": self.q_series,
            "q_max": self.q_max,
            "fom": self.fom,
            "spurious": [{"freq": f, "prominence": p} for f, p in self.spurious],
        }


@dataclass(frozen=True)
class BodeQ:
    """Bode-Q curve aligned with the input grid.

    Points with |S11| >= 1 are excluded (``q`` is NaN there); points with a
    negative group delay are kept at ``q = 0`` and flagged.
    """

    freqs: np.ndarray
    q: np.ndarray
    negative_delay: np.ndarray
    excluded: np.ndarray

    def peak(self) -> tuple[float, float]:
        """(frequency, value) of the maximum, refined parabolically when interior."""
        valid = np.where(self.excluded, -np.inf, self.q)
        i = int(np.argmax(valid))
        lo, hi = i - 1, i + 1
        if lo >= 0 and hi < len(valid) and np.isfinite(valid[lo]) and np.isfinite(valid[hi]):
            return parabolic_peak(self.freqs, valid, i)
        return float(self.freqs[i]), float(valid[i])

    @property
    def max(self) -> float:
        return self.peak()[1]


@dataclass(frozen=True)
class PowerSweep:
    p_in: np.ndarray
    response: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_in, dtype=float).reshape(-1)
        r = np.asarray(self.response, dtype=float).reshape(-1)
        object.__setattr__(self, "p_in", p)
        object.__setattr__(self, "response", r)
        if len(p) < 4:
            raise ValueError("a power sweep needs at least 4 points")
        if len(r) != len(p):
            raise ValueError("p_in and response lengths differ")
        if np.any(np.diff(p) <= 0):
            raise ValueError("p_in must be strictly increasing")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(r))):
            raise ValueError("power sweep contains non-finite values")


def _interior_argmax(values: np.ndarray) -> int:
    i = int(np.argmax(values))
    if i == 0 or i == len(values) - 1:
        raise NoResonanceError("no resonance found: maximum sits on the band edge")
    return i


def find_fs_fp(sweep: AdmittanceSweep, fp_method: str = "max_resistance") -> tuple[float, float]:
    """Series and parallel resonance frequencies.

    f_s is the conductance maximum and f_p the resistance (Re 1/Y) maximum,
    both refined by three-point parabolic interpolation. ``fp_method=
    "min_abs_y"`` locates f_p at the |Y| minimum instead.
    """
    f = sweep.freqs
    g = sweep.conductance
    f_s = parabolic_peak(f, g, _interior_argmax(g))[0]
    if fp_method == "max_resistance":
        rz = sweep.impedance.real
        rz = np.where(np.isfinite(rz), rz, np.nanmax(np.where(np.isfinite(rz), rz, -np.inf)))
        f_p = parabolic_peak(f, rz, _interior_argmax(rz))[0]
    elif fp_method == "min_abs_y":
        neg = -np.abs(sweep.y)
        f_p = parabolic_peak(f, neg, _interior_argmax(neg))[0]
    else:
        raise ValueError(f"unknown fp_method {fp_method!r}")
    if not f_p > f_s:
        raise BandEdgeError(f"f_p ({f_p:.6g} Hz) is not above f_s ({f_s:.6g} Hz); band may not cover antiresonance")
    return f_s, f_p


def kt2_from_freqs(f_s: float, f_p: float) -> float:
    """Effective coupling kt2 ~ (pi^2/8) (f_p^2 - f_s^2) / f_s^2.

    This is the usual approximation for strongly coupled acoustic
    resonators; it is not bounded by 1 for arbitrary inputs.
    """
    if not f_s > 0:
        raise ValueError(f"f_s must be positive, got {f_s}")
    if f_p < f_s:
        raise ValueError(f"f_p ({f_p}) must not be below f_s ({f_s})")
    return COUPLING_FACTOR * (f_p * f_p - f_s * f_s) / (f_s * f_s)


def _crossing(f: np.ndarray, v: np.ndarray, level: float, start: int, step: int) -> float:
    i = start
    while 0 <= i + step < len(v):
        j = i + step
        if v[j] < level:
            t = (v[i] - level) / (v[i] - v[j])
            return float(f[i] + t * (f[j] - f[i]))
        i = j
    raise BandEdgeError("half-power crossing lies outside the measured band")


def q_series_3db(sweep: AdmittanceSweep, f_s: float, quantity: str = "conductance") -> float:
    """Q_s = f_s / (3 dB bandwidth) around the series resonance.

    With the default ``quantity="conductance"`` the band is where
    G(f) >= G(f_s)/2 (G is power-like). ``"abs_y"`` uses |Y| >= |Y(f_s)|/sqrt 2.
    Crossings are located by linear interpolation.
    """
    f = sweep.freqs
    if quantity == "conductance":
        v, ratio = sweep.conductance, 0.5
    elif quantity == "abs_y":
        v, ratio = np.abs(sweep.y), 1.0 / math.sqrt(2.0)
    else:
        raise ValueError(f"unknown quantity {quantity!r}")
    if not f[0] <= f_s <= f[-1]:
        raise BandEdgeError("f_s is outside the sweep")
    level = ratio * float(np.interp(f_s, f, v))
    i = int(np.searchsorted(f, f_s))
    i = min(max(i, 0), len(f) - 1)
    # start from the sample nearest f_s that is still above the level
    if v[i] < level and i > 0:
        i -= 1
    lo = _crossing(f, v, level, i, -1)
    hi = _crossing(f, v, level, i, +1)
    return f_s / (hi - lo)


def bode_q(sweep: FrequencySweep) -> BodeQ:
    """Q(f) = 2 pi f tau(f) |S11| / (1 - |S11|^2) with tau the S11 group delay."""
    freqs, tau = group_delay(sweep)
    mag = np.abs(sweep.s11)
    excluded = mag >= 1.0
    if np.all(excluded):
        raise ValueError("|S11| >= 1 at every point; Bode-Q undefined")
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 2.0 * np.pi * freqs * tau * mag / (1.0 - mag * mag)
    negative = (tau < 0) & ~excluded
    q = np.where(negative, 0.0, q)
    q = np.where(excluded, np.nan, q)
    return BodeQ(freqs, q, negative, excluded)


def default_band(model: MbvdModel) -> tuple[float, float]:
    """[0.98 f_s, 1.02 f_p] of the dominant (largest c_m) branch."""
    b = model.dominant_branch()
    f_p = b.f_s * math.sqrt(1.0 + b.c_m / model.c_0)
    return 0.98 * b.f_s, 1.02 * f_p


def model_bode_q(model: MbvdModel, band: tuple[float, float] | None = None, z_ref: float = 50.0, n_points: int = Q_MAX_POINTS) -> BodeQ:
    if not model.branches:
        raise ValueError("model has no motional branch")
    lo, hi = band or default_band(model)
    if not 0 < lo < hi:
        raise ValueError(f"invalid band {lo}..{hi}")
    freqs = np.linspace(lo, hi, n_points)
    ysw = admittance(model, freqs)
    return bode_q(y_to_s(AdmittanceSweep(freqs, ysw.y, z_ref)))


def q_max_from_model(model: MbvdModel, band: tuple[float, float] | None = None, z_ref: float = 50.0, check: bool = True) -> float:
    """Maximum Bode-Q of the model curve on a 2001-point grid over ``band``.

    Taking the maximum on the smooth model curve rather than on measured
    data keeps spurious ripple from inflating the result. With ``check``
    the value is recomputed on a twice-denser grid and a warning is issued
    if the two differ by more than 0.1%.
    """
    q = model_bode_q(model, band, z_ref).max
    if check:
        q2 = model_bode_q(model, band, z_ref, 2 * Q_MAX_POINTS - 1).max
        if abs(q2 - q) > 1e-3 * abs(q):
            warnings.warn(f"q_max not grid-converged: {q:.6g} vs {q2:.6g} on a denser grid", RuntimeWarning, stacklevel=2)
    return q


def fom(kt2: float, q_max: float) -> float:
    if kt2 < 0 or q_max < 0:
        raise ValueError("kt2 and q_max must be non-negative")
    return kt2 * q_max


def spurious_census(sweep: AdmittanceSweep, f_s: float, f_p: float) -> list[tuple[float, float]]:
    """Conductance peaks strictly between f_s and f_p, main peak excluded.

    A peak qualifies when its prominence is at least 1% of G(f_s).
    Returns ``[(freq, prominence), ...]`` sorted by frequency.
    """
    f = sweep.freqs
    g = sweep.conductance
    g_s = float(np.interp(f_s, f, g))
    peaks, props = find_peaks(g, prominence=SPURIOUS_PROMINENCE * abs(g_s))
    i_s = int(np.argmin(np.abs(f - f_s)))
    out = []
    for p, prom in zip(peaks, props["prominences"]):
        if abs(int(p) - i_s) <= 1:
            continue
        fk = parabolic_peak(f, g, int(p))[0]
        if f_s < fk < f_p:
            out.append((fk, float(prom)))
    return sorted(out)


def p1db(sweep: PowerSweep) -> float | None:
    """Input power where the response falls 1 dB below its small-signal line.

    The line is fitted to the lowest quarter of the input-power span. The
    crossing is linearly interpolated between the bracketing samples.
    Returns ``None`` when the response never compresses by 1 dB.
    """
    p, r = sweep.p_in, sweep.response
    small = p <= p[0] + 0.25 * (p[-1] - p[0])
    if small.sum() < 2:
        raise ValueError("fewer than 2 points in the small-signal region")
    slope, icpt = np.polyfit(p[small], r[small], 1)
    dev = r - (slope * p + icpt)
    below = np.flatnonzero(dev <= -1.0)
    if below.size == 0:
        return None
    j = int(below[0])
    if j == 0:
        return float(p[0])
    t = (-1.0 - dev[j - 1]) / (dev[j] - dev[j - 1])
    return float(p[j - 1] + t * (p[j] - p[j - 1]))


def extract_metrics(
    sweep: FrequencySweep,
    model: MbvdModel | None = None,
    band: tuple[float, float] | None = None,
) -> ResonatorMetrics:
    """All reported figures for one device.

    f_s, f_p, kt2, Q_s and the spurious list come from the measured sweep.
    Q_max is taken on ``model``'s Bode-Q curve when a model is given, else on
    the measured Bode-Q over ``band`` (default [0.98 f_s, 1.02 f_p]).
    """
    ysw = s_to_y(sweep)
    f_s, f_p = find_fs_fp(ysw)
    kt2 = kt2_from_freqs(f_s, f_p)
    q_s = q_series_3db(ysw, f_s)
    if model is not None:
        q_max = q_max_from_model(model, band, sweep.z_ref)
    else:
        lo, hi = band or (0.98 * f_s, 1.02 * f_p)
        sel = (sweep.freqs >= lo) & (sweep.freqs <= hi)
        q_max = bode_q(FrequencySweep(sweep.freqs[sel], sweep.s11[sel], sweep.z_ref)).max
    return ResonatorMetrics(f_s, f_p, kt2, q_s, q_max, fom(kt2, q_max), tuple(spurious_census(ysw, f_s, f_p)))
