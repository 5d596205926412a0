"""Command-line front end: ``sawkit <command> ...`` (or ``python -m sawkit``).

Exit codes: 0 success, 2 input or parse error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import devices, dispersion, fitting, mbvd, metrics, network, touchstone
from .mbvd import dumps_sci

EXIT_INPUT = 2
EXIT_NUMERIC = 3


class UsageError(ValueError):
    pass


def _range(text: str, n_parts: int = 2) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != n_parts:
        raise UsageError(f"expected {n_parts} ':'-separated values, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad number in {text!r}") from None


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.12g}" if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _load_options(args) -> fitting.FitOptions:
    doc = {}
    if getattr(args, "config", None):
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise UsageError("config file must hold a JSON object")
    if getattr(args, "branches", None) is not None:
        doc["branch_count"] = args.branches
    return fitting.FitOptions.from_dict(doc)


def cmd_parse(args) -> int:
    for path in sorted(args.files):
        sw = touchstone.read_s1p(path)
        print(f"{path}: {len(sw)} points, {sw.freqs[0]:.9g}..{sw.freqs[-1]:.9g} Hz, z_ref {sw.z_ref:g} ohm")
        if args.echo:
            sys.stdout.write(touchstone.write_touchstone(sw, args.format))
    return 0


def cmd_y(args) -> int:
    ysw = network.s_to_y(touchstone.read_s1p(args.file))
    _write_text(args.csv, _csv(["freq_hz", "g_s", "b_s"], zip(ysw.freqs, ysw.conductance, ysw.susceptance)))
    return 0


def cmd_bodeq(args) -> int:
    bq = metrics.bode_q(touchstone.read_s1p(args.file))
    _write_text(args.csv, _csv(["freq_hz", "bode_q"], zip(bq.freqs, bq.q)))
    return 0


def _fit_file(path: str, options: fitting.FitOptions):
    sw = touchstone.read_s1p(path)
    ysw = network.s_to_y(sw)
    return sw, ysw, fitting.fit_sweep(ysw, options)


def cmd_fit(args) -> int:
    options = _load_options(args)
    sw, ysw, result = _fit_file(args.file, options)
    if args.report:
        report_path = Path(args.report)
        stem = report_path.with_suffix("")
        m = metrics.extract_metrics(sw, result.model)
        g_path = Path(f"{stem}_conductance.csv")
        q_path = Path(f"{stem}_bodeq.csv")
        g_path.write_text(_csv(["freq_hz", "g_s"], zip(ysw.freqs, ysw.conductance)), encoding="utf-8")
        bq = metrics.model_bode_q(result.model, z_ref=sw.z_ref)
        q_path.write_text(_csv(["freq_hz", "bode_q"], zip(bq.freqs, bq.q)), encoding="utf-8")
        report = {
            "design": devices.DeviceDesign.from_dict(json.loads(Path(args.design).read_text())).to_dict() if args.design else None,
            "fit_result": result.to_dict(),
            "metrics": m.to_dict(),
            "curves": {"conductance": g_path.name, "bode_q": q_path.name},
        }
        if args.timestamp:
            report["timestamp"] = datetime.now(timezone.utc).isoformat()
        report_path.write_text(dumps_sci(report) + "\n", encoding="utf-8")
    if args.model_out:
        Path(args.model_out).write_text(result.model.to_json() + "\n", encoding="utf-8")
    sys.stdout.write(dumps_sci(result.to_dict()) + "\n")
    return 0 if result.converged else EXIT_NUMERIC


def cmd_metrics(args) -> int:
    band = _range(args.band) if args.band else None
    path = Path(args.file)
    if path.suffix.lower() == ".json":
        model = mbvd.MbvdModel.from_json(path.read_text(encoding="utf-8"))
        lo, hi = band or metrics.default_band(model)
        freqs = np.linspace(lo, hi, metrics.Q_MAX_POINTS)
        sw = network.y_to_s(network.AdmittanceSweep(freqs, mbvd.admittance(model, freqs).y, args.z_ref))
        m = metrics.extract_metrics(sw, model, band)
    else:
        sw = touchstone.read_s1p(path)
        if args.raw:
            m = metrics.extract_metrics(sw, None, band)
        else:
            result = fitting.fit_sweep(network.s_to_y(sw), _load_options(args))
            m = metrics.extract_metrics(sw, result.model, band)
    sys.stdout.write(dumps_sci(m.to_dict()) + "\n")
    return 0


def cmd_synth(args) -> int:
    model = mbvd.synth_from_specs(args.fs, args.kt2, args.c0, args.q, args.rs, args.r0)
    _write_text(args.out, model.to_json() + "\n")
    if args.s1p:
        lo, hi = _range(args.band) if args.band else metrics.default_band(model)
        freqs = np.linspace(lo, hi, args.points)
        sw = network.y_to_s(network.AdmittanceSweep(freqs, mbvd.admittance(model, freqs).y, args.z_ref))
        touchstone.write_s1p(args.s1p, sw)
    return 0


def read_power_csv(text: str) -> metrics.PowerSweep:
    reader = csv.DictReader(io.StringIO(text))
    if not {"pin_dbm", "response_db"} <= set(reader.fieldnames or []):
        raise UsageError("power-sweep CSV needs columns pin_dbm, response_db")
    p, r = [], []
    for n, row in enumerate(reader, start=2):
        try:
            p.append(float(row["pin_dbm"]))
            r.append(float(row["response_db"]))
        except (TypeError, ValueError):
            raise UsageError(f"power-sweep CSV line {n}: bad number") from None
    return metrics.PowerSweep(np.array(p), np.array(r))


def cmd_p1db(args) -> int:
    value = metrics.p1db(read_power_csv(Path(args.file).read_text(encoding="utf-8")))
    print("not found" if value is None else f"{value:.3f}")
    return 0


def cmd_compare(args) -> int:
    rows = devices.compare_survey(devices.read_survey_csv(Path(args.file).read_text(encoding="utf-8")))
    _write_text(args.out, devices.write_survey_table(rows))
    return 0


def _stacks(spec: str) -> tuple[dispersion.LayeredStack, dispersion.LayeredStack]:
    text = Path(spec).read_text(encoding="utf-8") if Path(spec).is_file() else spec
    try:
        doc = json.loads(text)
        return dispersion.LayeredStack(**doc["open"]), dispersion.LayeredStack(**doc["short"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"--stack needs JSON with 'open' and 'short' layer parameters ({exc})") from None


def cmd_dispersion(args) -> int:
    s_open, s_short = _stacks(args.stack)
    lo, hi, n = _range(args.grid, 3)
    if n < 1 or n != int(n):
        raise UsageError("grid point count must be a positive integer")
    grid = np.linspace(lo, hi, int(n))
    rows = []
    for h, k in dispersion.kint2_curve(s_open, s_short, grid):
        rows.append((h, dispersion.love_velocity(s_open, h), dispersion.love_velocity(s_short, h), k))
    _write_text(args.csv, _csv(["h_over_lambda", "v_open", "v_short", "kint2"], rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sawkit", description="One-port acoustic resonator analysis.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="validate Touchstone files (optionally echo them back)")
    s.add_argument("files", nargs="+")
    s.add_argument("--echo", action="store_true")
    s.add_argument("--format", default="RI", choices=touchstone.FORMATS)
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("y", help="admittance CSV from a Touchstone file")
    s.add_argument("file")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_y)

    s = sub.add_parser("bodeq", help="Bode-Q CSV from a Touchstone file")
    s.add_argument("file")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_bodeq)

    s = sub.add_parser("fit", help="fit a multi-branch mBVD model")
    s.add_argument("file")
    s.add_argument("--branches", type=int)
    s.add_argument("--config")
    s.add_argument("--report")
    s.add_argument("--design", help="DeviceDesign JSON to embed in the report")
    s.add_argument("--model-out")
    s.add_argument("--timestamp", action="store_true")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("metrics", help="extract f_s, f_p, kt2, Q_s, Q_max, FoM, spurious modes")
    s.add_argument("file", help=".s1p sweep or model .json")
    s.add_argument("--band", help="lo:hi in Hz for the Q_max search")
    s.add_argument("--raw", action="store_true", help="take Q_max from measured Bode-Q instead of a fitted model")
    s.add_argument("--branches", type=int)
    s.add_argument("--config")
    s.add_argument("--z-ref", type=float, default=50.0)
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("synth", help="single-branch model from f_s, kt2, c_0, Q")
    s.add_argument("--fs", type=float, required=True)
    s.add_argument("--kt2", type=float, required=True)
    s.add_argument("--c0", type=float, required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--rs", type=float, default=0.0)
    s.add_argument("--r0", type=float, default=0.0)
    s.add_argument("--out")
    s.add_argument("--s1p", help="also write a synthetic sweep of the model")
    s.add_argument("--band", help="lo:hi in Hz for --s1p")
    s.add_argument("--points", type=int, default=2001)
    s.add_argument("--z-ref", type=float, default=50.0)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("p1db", help="1 dB compression point of a power sweep CSV")
    s.add_argument("file")
    s.set_defaults(func=cmd_p1db)

    s = sub.add_parser("compare", help="unified-definition FoM table from a survey CSV")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("dispersion", help="k_int^2 versus h/lambda from the Love-wave surrogate")
    s.add_argument("--stack", required=True, help="JSON (file or inline) with 'open' and 'short' stacks")
    s.add_argument("--grid", required=True, help="lo:hi:n in h/lambda")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_dispersion)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ArithmeticError, metrics.ExtractionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
