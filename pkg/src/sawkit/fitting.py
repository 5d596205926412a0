"""mBVD extraction from a measured admittance sweep.

Two stages: :func:`seed_model` reads a starting model off the conductance
peaks, then :func:`fit` refines every element with a damped (Levenberg
style) least-squares loop in log-parameter space.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .mbvd import MbvdModel, MotionalBranch, admittance_arrays
from .network import AdmittanceSweep
from .peaks import parabolic_peak

MAX_BRANCHES = 6
SEED_PROMINENCE = 0.05
WEIGHT_FLOOR = 1e-6  # S; floor on |Y| in inverse-magnitude weights
FD_STEP = 1e-6
DAMPING_UP = 10.0
DAMPING_DOWN = 3.0
DAMPING_INIT = 1e-3
DAMPING_MAX = 1e16
MIN_RESISTANCE = 1e-3  # ohm; zero resistances cannot live in log space
LOG_BOX = math.log(1e12)  # each element stays within 1e12 of its seed value either way


class FitError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 200
    relative_cost_tolerance: float = 1e-9
    weight_mode: str = "inverse_magnitude"
    branch_count: int | None = None
    recenter: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.relative_cost_tolerance > 0:
            raise ValueError("relative_cost_tolerance must be > 0")
        if self.weight_mode not in ("uniform", "inverse_magnitude"):
            raise ValueError(f"unknown weight_mode {self.weight_mode!r}")
        if self.branch_count is not None and not 0 <= self.branch_count <= MAX_BRANCHES:
            raise ValueError(f"branch_count must be in [0, {MAX_BRANCHES}]")

    @classmethod
    def from_dict(cls, doc: dict) -> "FitOptions":
        known = {k: doc[k] for k in ("max_iterations", "relative_cost_tolerance", "weight_mode", "branch_count", "recenter") if k in doc}
        return cls(**known)


@dataclass(frozen=True)
class FitResult:
    model: MbvdModel
    residual_rms: float
    iterations: int
    converged: bool
    cost: float = 0.0
    cost_history: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            **self.model.to_dict(),
            "residual_rms": float(self.residual_rms),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }


# -- seeding -----------------------------------------------------------------


def seed_model(sweep: AdmittanceSweep, branch_count: int | None = None) -> MbvdModel:
    """Starting model read directly off the admittance curve.

    ``c_0`` comes from the mean of B/(2 pi f) over the lowest tenth of the
    band and ``r_s`` from the floor of Re(1/Y) over the whole band (on
    sweeps that stop just above antiresonance the top of the band is still
    far above the floor). Each
    conductance peak whose prominence reaches 5% of the conductance range
    becomes one motional branch (largest prominence first, at most six
    branches unless ``branch_count`` says otherwise).
    """
    f = sweep.freqs
    n = len(f)
    decile = max(1, n // 10)
    g = sweep.conductance
    c_0 = float(np.mean(sweep.susceptance[:decile] / (2.0 * np.pi * f[:decile])))
    if not c_0 > 0:
        raise FitError("low-band susceptance is not capacitive; cannot seed c_0")
    re_z = sweep.impedance.real
    floor = float(np.min(re_z[np.isfinite(re_z)])) if np.any(np.isfinite(re_z)) else 0.0
    r_s = max(floor, MIN_RESISTANCE)
    r_0 = max(0.1 * floor, MIN_RESISTANCE)

    if branch_count == 0:
        return MbvdModel(r_s, r_0, c_0, ())
    if n < 16:
        raise FitError("need at least 16 points to seed motional branches")

    span = float(g.max() - g.min())
    peaks, props = find_peaks(g, prominence=SEED_PROMINENCE * span) if span > 0 else (np.array([], int), {})
    if len(peaks) == 0:
        if branch_count:
            raise FitError("no conductance peaks found but motional branches were requested")
        return MbvdModel(r_s, r_0, c_0, ())
    order = np.argsort(-props["prominences"], kind="stable")
    cap = MAX_BRANCHES if branch_count is None else branch_count
    order = order[:cap]
    peaks, prom = peaks[order], props["prominences"][order]
    widths = peak_widths(g, peaks, rel_height=0.5, prominence_data=(prom, props["left_bases"][order], props["right_bases"][order]))
    idx = np.arange(n)
    branches = []
    for k, (p, pr, left, right) in enumerate(zip(peaks, prom, widths[2], widths[3])):
        f_k = parabolic_peak(f, g, int(p))[0]
        df = float(np.interp(right, idx, f) - np.interp(left, idx, f))
        if not df > 0:
            df = float(f[min(p + 1, n - 1)] - f[max(p - 1, 0)])
        q_k = f_k / df
        r_m = 1.0 / pr
        w_k = 2.0 * np.pi * f_k
        l_m = q_k * r_m / w_k
        c_m = 1.0 / (w_k * w_k * l_m)
        branches.append(MotionalBranch(r_m, l_m, c_m, f"B{k + 1}"))
    return MbvdModel(r_s, r_0, c_0, tuple(branches))


# -- refinement ----------------------------------------------------------------


def _pack(model: MbvdModel) -> np.ndarray:
    vals = [max(model.r_s, MIN_RESISTANCE), max(model.r_0, MIN_RESISTANCE), model.c_0]
    for b in model.branches:
        vals += [max(b.r_m, MIN_RESISTANCE), b.l_m, b.c_m]
    return np.log(np.array(vals, dtype=float))


def _unpack(theta: np.ndarray, template: MbvdModel) -> MbvdModel:
    v = np.exp(theta)
    branches = tuple(
        MotionalBranch(float(v[3 + 3 * k]), float(v[4 + 3 * k]), float(v[5 + 3 * k]), b.label)
        for k, b in enumerate(template.branches)
    )
    return MbvdModel(float(v[0]), float(v[1]), float(v[2]), branches)


def _model_y(freqs: np.ndarray, theta: np.ndarray) -> np.ndarray:
    v = np.exp(theta)
    return admittance_arrays(freqs, v[0], v[1], v[2], v[3::3], v[4::3], v[5::3])


def _weights(y: np.ndarray, mode: str) -> np.ndarray:
    if mode == "uniform":
        return np.ones(len(y))
    return 1.0 / np.maximum(np.abs(y) ** 2, WEIGHT_FLOOR**2)


def _residuals(freqs, y, sqrt_w, theta) -> np.ndarray:
    d = sqrt_w * (_model_y(freqs, theta) - y)
    return np.concatenate([d.real, d.imag])


def weighted_cost(sweep: AdmittanceSweep, model: MbvdModel, weight_mode: str = "inverse_magnitude") -> float:
    """C = sum_i w_i |Y_model(f_i) - Y_i|^2 for a given model."""
    w = _weights(sweep.y, weight_mode)
    m = model.canonical()
    y_m = admittance_arrays(
        sweep.freqs, m.r_s, m.r_0, m.c_0,
        np.array([b.r_m for b in m.branches]), np.array([b.l_m for b in m.branches]), np.array([b.c_m for b in m.branches]),
    )
    return float(np.sum(w * np.abs(y_m - sweep.y) ** 2))


def _peak_candidates(freqs: np.ndarray, g: np.ndarray, limit: int = 12) -> np.ndarray:
    """Strongest conductance peaks; a peak inside the half-height span of a stronger one is dropped."""
    span = float(g.max() - g.min())
    if not span > 0:
        return np.array([])
    peaks, props = find_peaks(g, prominence=SEED_PROMINENCE * span)
    if len(peaks) == 0:
        return np.array([])
    order = np.argsort(-props["prominences"], kind="stable")
    _, _, left, right = peak_widths(g, peaks, rel_height=0.5, prominence_data=(props["prominences"], props["left_bases"], props["right_bases"]))
    kept: list[int] = []
    for i in order:
        if any(left[j] <= peaks[i] <= right[j] for j in kept):
            continue
        kept.append(i)
        if len(kept) == limit:
            break
    return np.array([parabolic_peak(freqs, g, int(peaks[i]))[0] for i in kept])


def _recenter(freqs, y, w, theta, max_combinations: int = 5000) -> np.ndarray:
    """Place branches (keeping each one's c_m and Q) on measured conductance peaks.

    Local damped least squares cannot pull a high-Q branch across many
    linewidths, so every branch is first put inside a basin. Each branch
    either stays where it is or moves to one of the strongest conductance
    peaks of the data, no two branches sharing a peak; the lowest-cost
    assignment wins. Large problems fall back to a greedy pass. Uniform
    weights are used here so that the large series-resonance admittances,
    not the antiresonance valleys, decide the placement.
    """
    theta = theta.copy()
    n_br = (len(theta) - 3) // 3
    peaks = _peak_candidates(freqs, y.real, limit=n_br + 2)
    if n_br == 0 or len(peaks) == 0:
        return theta

    def cost(t):
        c = float(np.sum(w * np.abs(_model_y(freqs, t) - y) ** 2))
        return c if math.isfinite(c) else math.inf

    def moved(t, k, f_c):
        t = t.copy()
        log_c = t[5 + 3 * k]
        log_q = 0.5 * (t[4 + 3 * k] - log_c) - t[3 + 3 * k]
        log_l = -2.0 * math.log(2.0 * math.pi * f_c) - log_c
        t[4 + 3 * k] = log_l
        t[3 + 3 * k] = 0.5 * (log_l - log_c) - log_q
        return t

    # a branch already sitting on a candidate (within one linewidth) occupies it
    home = []
    for k in range(n_br):
        log_r, log_l, log_c = theta[3 + 3 * k : 6 + 3 * k]
        f_k = 1.0 / (2.0 * math.pi * math.exp(0.5 * (log_l + log_c)))
        width = f_k * math.exp(log_r - 0.5 * (log_l - log_c))
        near = np.flatnonzero(np.abs(peaks - f_k) <= width)
        home.append(int(near[np.argmin(np.abs(peaks[near] - f_k))]) if near.size else None)

    best, best_t = cost(theta), theta
    choices = range(-1, len(peaks))  # -1: stay put
    if (len(peaks) + 1) ** n_br <= max_combinations:
        for combo in itertools.product(choices, repeat=n_br):
            used = [c if c >= 0 else home[k] for k, c in enumerate(combo)]
            used = [c for c in used if c is not None]
            if len(set(used)) != len(used):
                continue
            t = theta
            for k, c in enumerate(combo):
                if c >= 0:
                    t = moved(t, k, peaks[c])
            c_t = cost(t)
            if c_t < best:
                best, best_t = c_t, t
        return best_t
    for _ in range(2):
        for k in np.argsort(-best_t[5::3], kind="stable"):
            for f_c in peaks:
                t = moved(best_t, k, f_c)
                c_t = cost(t)
                if c_t < best:
                    best, best_t = c_t, t
    return best_t


def _settle_reactive(freqs, y, theta) -> np.ndarray:
    """Re-solve c_0 and every c_m with branch frequencies and Q held.

    Away from the series resonances the losses barely touch the
    susceptance, and B/(2 pi f) = c_0 + sum_k c_mk / (1 - (f/f_k)^2) is
    linear in the capacitances. Samples within four linewidths of a branch
    resonance are left out. The solution is returned only when every
    capacitance comes out positive.
    """
    n_br = (len(theta) - 3) // 3
    if n_br == 0:
        return theta
    v = np.exp(theta)
    f_k = 1.0 / (2.0 * np.pi * np.sqrt(v[4::3] * v[5::3]))
    width = f_k * v[3::3] / np.sqrt(v[4::3] / v[5::3])
    keep = np.ones(len(freqs), dtype=bool)
    for fk, wk in zip(f_k, width):
        keep &= np.abs(freqs - fk) > 4.0 * wk
    if keep.sum() < 2 * (n_br + 1):
        return theta
    a = np.column_stack([np.ones(len(freqs))] + [1.0 / (1.0 - (freqs / fk) ** 2) for fk in f_k])[keep]
    b = (y.imag / (2.0 * np.pi * freqs))[keep]
    sol = np.linalg.lstsq(a, b, rcond=None)[0]
    if not np.all(sol > 0):
        return theta
    out = theta.copy()
    out[2] = math.log(sol[0])
    for k in range(n_br):
        log_q = 0.5 * (theta[4 + 3 * k] - theta[5 + 3 * k]) - theta[3 + 3 * k]
        out[5 + 3 * k] = math.log(sol[1 + k])
        out[4 + 3 * k] = -2.0 * math.log(2.0 * math.pi * f_k[k]) - out[5 + 3 * k]
        out[3 + 3 * k] = 0.5 * (out[4 + 3 * k] - out[5 + 3 * k]) - log_q
    return out


def _levenberg(freqs, y, sqrt_w, theta, free, budget, tol, lower, upper):
    """Damped least-squares loop over the ``free`` entries of ``theta``.

    Trial points are clipped into the box ``[lower, upper]``.

    Returns ``(theta, residuals, history, iterations, converged)``.
    """
    r = _residuals(freqs, y, sqrt_w, theta)
    cost = float(r @ r)
    history = [cost]
    idx = np.flatnonzero(free)
    lam = DAMPING_INIT
    small_steps = 0
    iterations = 0
    jac = scale = None
    while iterations < budget:
        if cost == 0.0:
            return theta, r, history, iterations, True
        if jac is None:
            jac = np.empty((len(r), len(idx)))
            for j, k in enumerate(idx):
                t = theta.copy()
                t[k] += FD_STEP
                jac[:, j] = (_residuals(freqs, y, sqrt_w, t) - r) / FD_STEP
            scale = np.sqrt(np.maximum(np.sum(jac * jac, axis=0), 1e-300))
        iterations += 1
        a = np.vstack([jac, np.diag(math.sqrt(lam) * scale)])
        b = np.concatenate([-r, np.zeros(len(idx))])
        step = np.linalg.lstsq(a, b, rcond=None)[0]
        t_new = theta.copy()
        t_new[idx] = np.clip(t_new[idx] + step, lower[idx], upper[idx])
        r_new = _residuals(freqs, y, sqrt_w, t_new)
        c_new = float(r_new @ r_new)
        if math.isfinite(c_new) and c_new < cost:
            rel = (cost - c_new) / cost
            theta, r, cost = t_new, r_new, c_new
            history.append(cost)
            jac = None
            lam = max(lam / DAMPING_DOWN, 1e-300)
            small_steps = small_steps + 1 if rel < tol else 0
            if small_steps >= 2:
                return theta, r, history, iterations, True
        else:
            lam *= DAMPING_UP
            if lam > DAMPING_MAX:
                return theta, r, history, iterations, True
    return theta, r, history, iterations, False


def fit(sweep: AdmittanceSweep, seed: MbvdModel, options: FitOptions | None = None) -> FitResult:
    """Refine ``seed`` against ``sweep`` by damped least squares.

    Minimises sum_i w_i |Y_model - Y_i|^2 with real and imaginary parts as
    separate residual channels. All element values are optimised as
    logarithms, which keeps them positive. Damping is multiplied by 10 after
    a rejected step and divided by 3 after an accepted one; the Jacobian is
    a forward difference with step 1e-6 in log space.

    With ``options.recenter`` the branches are first snapped onto measured
    conductance peaks, the capacitances are re-solved linearly from the
    off-resonance susceptance, and the reactive elements (c_0, l_m, c_m)
    are refined with the resistances held, all before the full refinement.
    This keeps early large reactive corrections from driving a resistance
    towards zero. Every element is kept within a factor 1e12 of its seed.

    The run is converged when two consecutive accepted steps each lower the
    cost by less than ``relative_cost_tolerance`` (relative), when the cost
    reaches zero, or when damping saturates without finding a lower cost.
    If the iteration budget runs out first the best model so far is returned
    with ``converged=False``.
    """
    options = options or FitOptions()
    freqs, y = sweep.freqs, sweep.y
    n_par = 3 + 3 * len(seed.branches)
    if len(freqs) < 2 * n_par:
        raise ValueError(f"{len(freqs)} points is too few for {n_par} free parameters")
    w = _weights(y, options.weight_mode)
    sqrt_w = np.sqrt(w)
    theta = _pack(seed)
    lower, upper = theta - LOG_BOX, theta + LOG_BOX
    r0 = _residuals(freqs, y, sqrt_w, theta)
    if not math.isfinite(float(r0 @ r0)):
        raise FitError("cost is not finite at the seed")

    history: list[float] = []
    iterations = 0
    if options.recenter:
        theta = _recenter(freqs, y, np.ones(len(y)), theta)
        theta = _settle_reactive(freqs, y, theta)
        reactive = np.zeros(n_par, dtype=bool)
        reactive[2] = True
        reactive[4::3] = True
        reactive[5::3] = True
        budget = max(1, options.max_iterations // 4)
        theta, _, hist, iterations, _ = _levenberg(
            freqs, y, sqrt_w, theta, reactive, budget, options.relative_cost_tolerance, lower, upper
        )
        history.extend(hist)
    theta, r, hist, its, converged = _levenberg(
        freqs, y, sqrt_w, theta, np.ones(n_par, dtype=bool),
        options.max_iterations - iterations, options.relative_cost_tolerance, lower, upper,
    )
    history.extend(hist if not history else hist[1:])
    iterations += its
    cost = float(r @ r)
    model = _unpack(theta, seed)
    denom = float(np.sum(w * np.abs(y) ** 2))
    rms = math.sqrt(cost / denom) if denom > 0 else math.sqrt(cost)
    return FitResult(model, rms, iterations, converged, cost, tuple(history))


def fit_sweep(sweep: AdmittanceSweep, options: FitOptions | None = None) -> FitResult:
    """Seed then fit, honouring ``options.branch_count``."""
    options = options or FitOptions()
    return fit(sweep, seed_model(sweep, options.branch_count), options)
