"""Touchstone v1 one-port (.s1p) reader and writer.

Only single-port S-parameter files are handled. Two-port rows are rejected
outright instead of being silently truncated to S11.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
FORMATS = ("RI", "MA", "DB")
DB_FLOOR = -300.0


class TouchstoneError(ValueError):
    """Raised for malformed Touchstone input; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class FrequencySweep:
    """One-port reflection data on a strictly increasing frequency grid.

    Attributes:
        freqs: frequencies in Hz.
        s11: complex reflection coefficients.
        z_ref: real reference impedance in ohms.
    """

    freqs: np.ndarray
    s11: np.ndarray
    z_ref: float = 50.0

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float).reshape(-1)
        s11 = np.asarray(self.s11, dtype=complex).reshape(-1)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "s11", s11)
        object.__setattr__(self, "z_ref", float(self.z_ref))
        check_grid(freqs, len(s11))
        if not np.all(np.isfinite(s11)):
            raise ValueError("s11 contains non-finite values")
        if not (self.z_ref > 0 and math.isfinite(self.z_ref)):
            raise ValueError(f"z_ref must be positive, got {self.z_ref}")

    def __len__(self) -> int:
        return len(self.freqs)


def check_grid(freqs: np.ndarray, n_values: int, min_points: int = 1) -> None:
    if freqs.size < min_points:
        raise ValueError(f"need at least {min_points} frequency points")
    if n_values != freqs.size:
        raise ValueError(f"length mismatch: {freqs.size} frequencies, {n_values} values")
    if not np.all(np.isfinite(freqs)) or np.any(freqs <= 0):
        raise ValueError("frequencies must be finite and positive")
    if np.any(np.diff(freqs) <= 0):
        raise ValueError("frequencies must be strictly increasing")


def _parse_options(tokens: list[str], lineno: int) -> tuple[float, str, float]:
    unit, fmt, z_ref = "GHZ", "MA", 50.0
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in FREQ_UNITS:
            unit = tok
        elif tok in FORMATS:
            fmt = tok
        elif tok == "S":
            pass
        elif tok in ("Y", "Z", "G", "H"):
            raise TouchstoneError(f"unsupported parameter type {tok!r}; only S is accepted", lineno)
        elif tok == "R":
            if i + 1 >= len(tokens):
                raise TouchstoneError("option 'R' is missing its resistance value", lineno)
            try:
                z_ref = float(tokens[i + 1])
            except ValueError:
                raise TouchstoneError(f"bad reference resistance {tokens[i + 1]!r}", lineno) from None
            if not (math.isfinite(z_ref) and z_ref > 0):
                raise TouchstoneError(f"reference resistance must be positive, got {tokens[i + 1]}", lineno)
            i += 1
        else:
            raise TouchstoneError(f"unrecognised option token {tokens[i]!r}", lineno)
        i += 1
    return FREQ_UNITS[unit], fmt, z_ref


def _to_complex(a: float, b: float, fmt: str) -> complex:
    if fmt == "RI":
        return complex(a, b)
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    ang = math.radians(b)
    return complex(mag * math.cos(ang), mag * math.sin(ang))


def parse_touchstone(text: str | Iterable[str]) -> FrequencySweep:
    """Parse a Touchstone v1 one-port file.

    ``text`` may be the whole file contents or any iterable of lines (an
    open file object works). Comments start with ``!`` and may trail data.
    MA/DB angles are in degrees; DB magnitudes are 20*log10|S|.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    options = None
    freqs: list[float] = []
    values: list[complex] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if options is not None:
                raise TouchstoneError("duplicate option line", lineno)
            options = _parse_options(line[1:].split(), lineno)
            continue
        if options is None:
            raise TouchstoneError("data before option line", lineno)
        tokens = line.split()
        if len(tokens) != 3:
            if len(tokens) == 9:
                raise TouchstoneError("two-port data is not supported (one-port .s1p only)", lineno)
            raise TouchstoneError(f"expected 3 columns, found {len(tokens)}", lineno)
        try:
            f, a, b = (float(t) for t in tokens)
        except ValueError:
            raise TouchstoneError(f"could not parse number in {line!r}", lineno) from None
        if not all(map(math.isfinite, (f, a, b))):
            raise TouchstoneError("non-finite number", lineno)
        scale, fmt, _ = options
        f *= scale
        if f <= 0:
            raise TouchstoneError(f"frequency must be positive, got {f}", lineno)
        if freqs and f <= freqs[-1]:
            raise TouchstoneError("frequencies are not strictly increasing", lineno)
        freqs.append(f)
        values.append(_to_complex(a, b, fmt))
    if options is None:
        raise TouchstoneError("missing option line ('# <unit> S <format> R <ohms>')")
    if not freqs:
        raise TouchstoneError("empty data section")
    return FrequencySweep(np.array(freqs), np.array(values), options[2])


def write_touchstone(sweep: FrequencySweep, fmt: str = "RI", comment: str | None = None) -> str:
    """Serialise a sweep as Touchstone v1 text with frequencies in Hz.

    Numbers are written with 17 significant digits so that a parse of the
    output reproduces the sweep. In DB format a zero reflection is written
    at the -300 dB floor.
    """
    fmt = fmt.upper()
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    if len(sweep) == 0:
        raise ValueError("cannot write an empty sweep")
    out = []
    if comment:
        out.extend(f"! {c}" for c in comment.splitlines())
    out.append(f"# HZ S {fmt} R {sweep.z_ref:.17g}")
    for f, s in zip(sweep.freqs, sweep.s11):
        if fmt == "RI":
            a, b = s.real, s.imag
        else:
            mag = abs(s)
            b = math.degrees(math.atan2(s.imag, s.real))
            if fmt == "MA":
                a = mag
            else:
                a = 20.0 * math.log10(mag) if mag > 0 else DB_FLOOR
                a = max(a, DB_FLOOR)
        out.append(f"{f:.17g} {a:.17g} {b:.17g}")
    return "\n".join(out) + "\n"


def read_s1p(path) -> FrequencySweep:
    with open(path, encoding="utf-8") as fh:
        return parse_touchstone(fh.read())


def write_s1p(path, sweep: FrequencySweep, fmt: str = "RI") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_touchstone(sweep, fmt))
