"""Multi-branch modified Butterworth-Van Dyke (mBVD) resonator model.

Topology: a series resistance ``r_s`` feeding a parallel set made of the
static branch (``r_0`` in series with ``c_0``) and any number of motional
R-L-C branches, one per acoustic mode::

    Z(w) = r_s + 1 / ( 1/(r_0 + 1/(j w c_0)) + sum_k 1/(r_k + j w l_k + 1/(j w c_k)) )
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .network import AdmittanceSweep

Y_CAP = 1e12  # |Y| clip for the poles of an all-lossless model
COUPLING_FACTOR = math.pi**2 / 8.0


@dataclass(frozen=True)
class MotionalBranch:
    r_m: float
    l_m: float
    c_m: float
    label: str = "main"

    def __post_init__(self):
        if not (self.r_m >= 0 and math.isfinite(self.r_m)):
            raise ValueError(f"branch {self.label!r}: r_m must be >= 0, got {self.r_m}")
        if not (self.l_m > 0 and math.isfinite(self.l_m)):
            raise ValueError(f"branch {self.label!r}: l_m must be > 0, got {self.l_m}")
        if not (self.c_m > 0 and math.isfinite(self.c_m)):
            raise ValueError(f"branch {self.label!r}: c_m must be > 0, got {self.c_m}")

    @property
    def f_s(self) -> float:
        return 1.0 / (2.0 * math.pi * math.sqrt(self.l_m * self.c_m))


@dataclass(frozen=True)
class MbvdModel:
    r_s: float
    r_0: float
    c_0: float
    branches: tuple[MotionalBranch, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        for name in ("r_s", "r_0"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be >= 0, got {v}")
        if not (self.c_0 > 0 and math.isfinite(self.c_0)):
            raise ValueError(f"c_0 must be > 0, got {self.c_0}")
        labels = [b.label for b in self.branches]
        if len(set(labels)) != len(labels):
            raise ValueError(f"branch labels must be unique, got {labels}")

    def canonical(self) -> "MbvdModel":
        """Same model with branches sorted by series resonance frequency."""
        return replace(self, branches=tuple(sorted(self.branches, key=lambda b: (b.f_s, b.label))))

    def dominant_branch(self) -> MotionalBranch:
        if not self.branches:
            raise ValueError("model has no motional branch")
        return max(self.branches, key=lambda b: b.c_m)

    def to_dict(self) -> dict:
        return {
            "r_s": self.r_s,
            "r_0": self.r_0,
            "c_0": self.c_0,
            "branches": [
                {"label": b.label, "r_m": b.r_m, "l_m": b.l_m, "c_m": b.c_m} for b in self.branches
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MbvdModel":
        branches = [
            MotionalBranch(float(b["r_m"]), float(b["l_m"]), float(b["c_m"]), str(b.get("label", f"b{i + 1}")))
            for i, b in enumerate(doc.get("branches", []))
        ]
        return cls(float(doc["r_s"]), float(doc["r_0"]), float(doc["c_0"]), tuple(branches))

    def to_json(self, indent: int | None = 2) -> str:
        return dumps_sci(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "MbvdModel":
        return cls.from_dict(json.loads(text))


_SCI = re.compile(r'"@sci@([^"]*)"')


def dumps_sci(doc, indent: int | None = 2) -> str:
    """``json.dumps`` with every float written in round-trippable scientific notation."""

    def mark(o):
        if isinstance(o, float):
            if not math.isfinite(o):
                raise ValueError(f"cannot serialise non-finite number {o}")
            return f"@sci@{o:.16e}"
        if isinstance(o, dict):
            return {k: mark(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [mark(v) for v in o]
        return o

    return _SCI.sub(r"\1", json.dumps(mark(doc), indent=indent))


def admittance_arrays(freqs, r_s, r_0, c_0, r_m, l_m, c_m) -> np.ndarray:
    """Vectorised mBVD admittance; branch parameters are 1-D arrays (possibly empty)."""
    w = 2.0 * np.pi * np.asarray(freqs, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        y_par = 1.0 / (r_0 + 1.0 / (1j * w * c_0))
        for rk, lk, ck in zip(r_m, l_m, c_m):
            y_par = y_par + 1.0 / (rk + 1j * w * lk + 1.0 / (1j * w * ck))
        y = 1.0 / (r_s + 1.0 / y_par)
    if r_s == 0 or r_0 == 0 or np.any(np.asarray(r_m) == 0):
        y = _clip_poles(y)
    return y


def _clip_poles(y: np.ndarray) -> np.ndarray:
    mag = np.abs(y)
    bad = ~np.isfinite(y) | (mag > Y_CAP)
    if np.any(bad):
        y = y.copy()
        phase = np.where(np.isfinite(y[bad]), y[bad] / np.where(mag[bad] > 0, mag[bad], 1.0), 1j)
        phase = np.where(np.isfinite(phase), phase, 1j)
        y[bad] = Y_CAP * phase
    return y


def admittance(model: MbvdModel, freqs) -> AdmittanceSweep:
    """Model admittance on ``freqs`` (Hz), returned as an AdmittanceSweep."""
    freqs = np.asarray(freqs, dtype=float)
    if np.any(freqs <= 0):
        raise ValueError("frequencies must be positive")
    m = model.canonical()
    y = admittance_arrays(
        freqs,
        m.r_s,
        m.r_0,
        m.c_0,
        np.array([b.r_m for b in m.branches]),
        np.array([b.l_m for b in m.branches]),
        np.array([b.c_m for b in m.branches]),
    )
    return AdmittanceSweep(freqs, y)


def branch_resonance(branch: MotionalBranch) -> tuple[float, float]:
    """Series resonance (Hz) and unloaded Q of one motional branch.

    A lossless branch (``r_m == 0``) reports ``math.inf`` for Q.
    """
    f_s = branch.f_s
    q = math.inf if branch.r_m == 0 else math.sqrt(branch.l_m / branch.c_m) / branch.r_m
    return f_s, q


def synth_from_specs(
    f_s: float,
    kt2: float,
    c_0: float,
    q: float,
    r_s: float = 0.0,
    r_0: float = 0.0,
    label: str = "main",
) -> MbvdModel:
    """Single-branch model from target series resonance, coupling and Q.

    The motional capacitance follows from kt2 ~ (pi^2/8) c_m / c_0; the
    inductance then places the series resonance at ``f_s`` and ``r_m`` sets
    the branch Q.
    """
    if not 0 < kt2 < 1:
        raise ValueError(f"kt2 must lie in (0, 1), got {kt2}")
    if not f_s > 0:
        raise ValueError(f"f_s must be positive, got {f_s}")
    if not c_0 > 0:
        raise ValueError(f"c_0 must be positive, got {c_0}")
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    w = 2.0 * math.pi * f_s
    c_m = kt2 * c_0 / COUPLING_FACTOR
    l_m = 1.0 / (w * w * c_m)
    r_m = w * l_m / q
    return MbvdModel(r_s, r_0, c_0, (MotionalBranch(r_m, l_m, c_m, label),))


def kt2_from_capacitance(c_m: float, c_0: float) -> float:
    return COUPLING_FACTOR * c_m / c_0


def two_branch_model(
    sh: tuple[float, float, float],
    rayleigh: tuple[float, float, float],
    c_0: float,
    r_s: float = 0.0,
    r_0: float = 0.0,
) -> MbvdModel:
    """Two-mode model from ``(f_s, kt2, q)`` triples for an SH and a Rayleigh branch."""
    branches = []
    for label, (f, k, q) in (("SH", sh), ("Rayleigh", rayleigh)):
        b = synth_from_specs(f, k, c_0, q, label=label).branches[0]
        branches.append(b)
    return MbvdModel(r_s, r_0, c_0, tuple(branches))


def perturb(model: MbvdModel, factors: Sequence[float]) -> MbvdModel:
    """Scale every parameter (r_s, r_0, c_0, then r_m, l_m, c_m per branch) by ``factors``."""
    n = 3 + 3 * len(model.branches)
    if len(factors) != n:
        raise ValueError(f"expected {n} factors, got {len(factors)}")
    it = iter(factors)
    r_s, r_0, c_0 = model.r_s * next(it), model.r_0 * next(it), model.c_0 * next(it)
    branches = tuple(
        MotionalBranch(b.r_m * next(it), b.l_m * next(it), b.c_m * next(it), b.label) for b in model.branches
    )
    return MbvdModel(r_s, r_0, c_0, branches)
