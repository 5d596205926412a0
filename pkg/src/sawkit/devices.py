"""Device designs, literature survey entries, and the unified FoM comparison."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Iterable

from .metrics import fom, kt2_from_freqs


@dataclass(frozen=True)
class DeviceDesign:
    name: str
    lambda_nm: float
    h_ln_over_lambda: float
    aperture_lambdas: float
    n_e: int
    n_r: int
    duty_factor: float = 0.5
    electrode_thickness_nm: float = 50.0

    def __post_init__(self):
        for k in ("lambda_nm", "h_ln_over_lambda", "aperture_lambdas", "n_e", "n_r", "electrode_thickness_nm"):
            if not getattr(self, k) > 0:
                raise ValueError(f"{k} must be positive")
        if not 0 < self.duty_factor < 1:
            raise ValueError("duty_factor must lie in (0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "DeviceDesign":
        return cls(**doc)


@dataclass(frozen=True)
class ReportedDevice:
    """One column of the six-device comparison table, as published."""

    design: DeviceDesign
    c_0: float  # F
    r_m_sh: float  # ohm
    f_s: float  # Hz
    f_p: float  # Hz
    kt2_percent: float
    q_series: float
    q_max: float
    fom: int


def _dev(name, lam, h, n_r, c0_ff, rm, fs, fp, kt2, qs, qmax, fom_):
    return ReportedDevice(
        DeviceDesign(name, lam, h, 20, 80, n_r),
        c0_ff * 1e-15, rm, fs * 1e9, fp * 1e9, kt2, qs, qmax, fom_,
    )


# 500 nm Y-cut LN on SiC, 50 nm Al, 50% duty factor.
REPORTED_DEVICES: dict[str, ReportedDevice] = {
    d.design.name: d
    for d in (
        _dev("A", 800, 0.625, 60, 450, 0.443, 5.079, 5.530, 22.9, 52, 575, 131),
        _dev("B", 720, 0.695, 60, 410, 0.42, 5.576, 6.074, 23.0, 80, 530, 122),
        _dev("C", 640, 0.78, 60, 340, 0.47, 6.202, 6.712, 21.1, 38, 540, 114),
        _dev("D", 600, 0.833, 40, 330, 0.443, 6.531, 7.090, 22.0, 37, 565, 124),
        _dev("E", 560, 0.892, 40, 270, 0.51, 6.947, 7.534, 21.7, 46, 480, 104),
        _dev("F", 480, 1.04, 40, 220, 0.53, 7.896, 8.523, 20.3, 40, 350, 71),
    )
}

# Measured 1 dB compression (dBm); None where it was not reached below +13 dBm.
P1DB_REPORTED = {"D": None, "F": 11.6}
MAX_INCIDENT_POWER_DBM = 13.0


@dataclass(frozen=True)
class SurveyEntry:
    label: str
    technology: str
    f_s: float
    f_p: float
    q_max: float

    def __post_init__(self):
        if not (self.f_s > 0 and self.f_p > self.f_s):
            raise ValueError(f"survey row {self.label!r}: need f_p > f_s > 0")
        if not self.q_max > 0:
            raise ValueError(f"survey row {self.label!r}: q_max must be positive")


@dataclass(frozen=True)
class SurveyRow:
    label: str
    technology: str
    f_s: float
    kt2: float
    q_max: float
    fom: float


def reported_survey() -> list[SurveyEntry]:
    return [SurveyEntry(k, "LN/SiC SH-SAW", d.f_s, d.f_p, d.q_max) for k, d in REPORTED_DEVICES.items()]


def compare_survey(entries: Iterable[SurveyEntry]) -> list[SurveyRow]:
    """Recompute each entry's coupling from (f_s, f_p), then its FoM; rows sorted by f_s.

    Whatever coupling definition a source used, kt2 here is always
    (pi^2/8)(f_p^2 - f_s^2)/f_s^2 so that FoMs are comparable.
    """
    rows = []
    for e in entries:
        if not e.f_p > e.f_s:
            raise ValueError(f"survey row {e.label!r}: f_p must exceed f_s")
        k = kt2_from_freqs(e.f_s, e.f_p)
        rows.append(SurveyRow(e.label, e.technology, e.f_s, k, e.q_max, fom(k, e.q_max)))
    return sorted(rows, key=lambda r: (r.f_s, r.label))


SURVEY_COLUMNS = ("label", "technology", "fs_hz", "fp_hz", "qmax")


def read_survey_csv(text: str) -> list[SurveyEntry]:
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in SURVEY_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise ValueError(f"survey CSV is missing columns {missing}")
    out = []
    for n, row in enumerate(reader, start=2):
        try:
            vals = [float(row[c]) for c in ("fs_hz", "fp_hz", "qmax")]
        except (TypeError, ValueError):
            raise ValueError(f"survey CSV line {n} ({row.get('label')!r}): bad number") from None
        if not all(map(math.isfinite, vals)):
            raise ValueError(f"survey CSV line {n}: non-finite number")
        try:
            out.append(SurveyEntry(row["label"], row["technology"], *vals))
        except ValueError as exc:
            raise ValueError(f"survey CSV line {n}: {exc}") from None
    return out


def write_survey_table(rows: Iterable[SurveyRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "technology", "fs_hz", "kt2", "qmax", "fom"])
    for r in rows:
        w.writerow([r.label, r.technology, f"{r.f_s:.10g}", f"{r.kt2:.6f}", f"{r.q_max:.6g}", f"{r.fom:.3f}"])
    return buf.getvalue()
