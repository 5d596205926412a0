"""Acceptance gate: eight end-to-end criteria at their stated tolerances.

Each test prints one ``[ACCEPT n] PASS|FAIL ...`` line. Run standalone with
``python3 tests/test_acceptance.py`` for just the summary lines.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPT_LINES, add_noise, model_params, truth_freqs, truth_model  # noqa: E402
from sawkit.devices import REPORTED_DEVICES  # noqa: E402
from sawkit.dispersion import LayeredStack, dispersion_residual, love_velocity  # noqa: E402
from sawkit.fitting import fit  # noqa: E402
from sawkit.mbvd import admittance, perturb, synth_from_specs  # noqa: E402
from sawkit.metrics import PowerSweep, find_fs_fp, fom, kt2_from_freqs, model_bode_q, p1db, q_max_from_model  # noqa: E402
from sawkit.network import AdmittanceSweep  # noqa: E402
from sawkit.touchstone import FrequencySweep, parse_touchstone, write_touchstone  # noqa: E402

F_D = 6.531e9
C0_D = 330e-15


def _report(n, ok, detail):
    line = f"[ACCEPT {n}] {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPT_LINES.append(line)
    print(line)
    return ok


def criterion_1():
    t0 = time.perf_counter()
    diffs = {k: 100 * kt2_from_freqs(d.f_s, d.f_p) - d.kt2_percent for k, d in REPORTED_DEVICES.items()}
    dt = time.perf_counter() - t0
    worst = max(diffs, key=lambda k: abs(diffs[k]))
    ok = all(abs(v) <= 0.5 for v in diffs.values()) and dt < 1e-3
    return ok, f"coupling closure: worst {worst} {diffs[worst]:+.3f} pp (limit 0.5), {dt * 1e3:.3f} ms"


def criterion_2():
    t0 = time.perf_counter()
    got = {k: round(fom(d.kt2_percent / 100, d.q_max)) for k, d in REPORTED_DEVICES.items()}
    dt = time.perf_counter() - t0
    bad = {k: (got[k], d.fom) for k, d in REPORTED_DEVICES.items() if got[k] != d.fom}
    ok = not bad and dt < 1e-3
    return ok, f"FoM closure: mismatches {bad or 'none'} (computed, table), {dt * 1e3:.3f} ms"


def criterion_3():
    t0 = time.perf_counter()
    m = synth_from_specs(F_D, 0.22, C0_D, 565)
    f_s, f_p = find_fs_fp(admittance(m, np.linspace(6.3e9, 7.3e9, 20001)))
    kt2 = kt2_from_freqs(f_s, f_p)
    dt = time.perf_counter() - t0
    err = f_p / 7.090e9 - 1
    ok = abs(err) <= 5e-4 and abs(kt2 - 0.22) <= 0.002 and dt < 0.1
    return ok, f"device-D model: f_p {f_p / 1e9:.5f} GHz ({err:+.3%}), kt2 {kt2:.5f}, {dt * 1e3:.1f} ms"


def criterion_4(trials=20):
    truth = truth_model()
    clean = admittance(truth, truth_freqs())
    p_true = model_params(truth)
    rng = np.random.default_rng(4)
    worst_clean, noisy_pass, slowest = 0.0, 0, 0.0
    for _ in range(trials):
        t0 = time.perf_counter()
        res = fit(clean, perturb(truth, 1 + 0.2 * rng.choice([-1.0, 1.0], len(p_true))))
        slowest = max(slowest, time.perf_counter() - t0)
        worst_clean = max(worst_clean, float(np.max(np.abs(model_params(res.model) / p_true - 1))))
    worst_noisy = 0.0
    for _ in range(trials):
        noisy = AdmittanceSweep(clean.freqs, add_noise(clean.y, rng), clean.z_ref)
        t0 = time.perf_counter()
        res = fit(noisy, perturb(truth, 1 + 0.2 * rng.choice([-1.0, 1.0], len(p_true))))
        slowest = max(slowest, time.perf_counter() - t0)
        err = float(np.max(np.abs(model_params(res.model) / p_true - 1)))
        worst_noisy = max(worst_noisy, err)
        noisy_pass += err <= 0.02
    ok = worst_clean <= 1e-6 and noisy_pass >= 19 and slowest < 5.0
    return ok, (
        f"fit round trip: noiseless worst {worst_clean:.1e} (limit 1e-6), noisy {noisy_pass}/{trials} within 2% "
        f"(worst {worst_noisy:.2%}), slowest fit {slowest:.2f} s"
    )


def criterion_5():
    t0 = time.perf_counter()
    band = (0.99 * F_D, 1.01 * F_D)
    q0 = q_max_from_model(synth_from_specs(F_D, 0.22, C0_D, 500), band)
    q1 = q_max_from_model(synth_from_specs(F_D, 0.22, C0_D, 500, r_s=7.5), band)
    dt = time.perf_counter() - t0
    ok = abs(q0 / 500 - 1) <= 0.02 and q1 < q0 and dt < 1.0
    wide = model_bode_q(synth_from_specs(F_D, 0.22, C0_D, 500)).max
    return ok, (
        f"Bode-Q: max {q0:.1f} on f_s +/- 1% (limit 500 +/- 2%), with r_s=7.5 {q1:.1f}, {dt * 1e3:.0f} ms "
        f"[over [0.98 f_s, 1.02 f_p] the lossless-static curve peaks at {wide:.0f}]"
    )


def criterion_6(n_sweeps=1000):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    worst, exact = 0.0, True
    for _ in range(n_sweeps):
        n = int(rng.integers(2, 60))
        f = np.cumsum(rng.uniform(1e3, 1e8, n)) + rng.uniform(1e6, 1e10)
        s = rng.uniform(0, 1, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        sw = FrequencySweep(f, s, float(rng.uniform(1, 200)))
        for fmt in ("RI", "MA", "DB"):
            back = parse_touchstone(write_touchstone(sw, fmt))
            exact &= bool(np.array_equal(back.freqs, sw.freqs)) and back.z_ref == sw.z_ref
            worst = max(worst, float(np.max(np.abs(back.s11 - sw.s11))))
    dt = time.perf_counter() - t0
    ok = exact and worst < 1e-9 and dt < 5.0
    return ok, f"Touchstone round trip: {n_sweeps} sweeps x 3 formats, max |dS| {worst:.1e}, exact freqs {exact}, {dt:.2f} s"


def criterion_7():
    p = np.arange(-15.0, 13.0001, 0.25)
    s = 2.0
    p_sat = 11.6 - (10 / s) * math.log10(10 ** (s / 10) - 1)
    soft = p - (10 / s) * np.log10(1 + 10 ** (s * (p - p_sat) / 10))
    t0 = time.perf_counter()
    found = p1db(PowerSweep(p, soft))
    linear = p1db(PowerSweep(p, p - 20.0))
    dt = time.perf_counter() - t0
    ok = found is not None and abs(found - 11.6) <= 0.1 and linear is None and dt < 0.01
    return ok, f"P1dB: soft limiter {found:.3f} dBm (target 11.6 +/- 0.1), linear -> {linear}, {dt * 1e3:.2f} ms"


def criterion_8():
    stack = LayeredStack(3600.0, 4700 * 3600.0**2, 7100.0, 3210 * 7100.0**2)
    t0 = time.perf_counter()
    v0 = love_velocity(stack, 0.0)
    v10 = love_velocity(stack, 10.0)
    grid = np.linspace(0.0, 3.0, 100)
    v = np.array([love_velocity(stack, h) for h in grid])
    resid = max(abs(dispersion_residual(stack, h, x)) for h, x in zip(grid[1:], v[1:]))
    dt = time.perf_counter() - t0
    mono = bool(np.all(np.diff(v) <= 0))
    near = abs(v10 / stack.v_layer - 1)
    ok = v0 == stack.v_sub and near <= 5e-3 and mono and resid < 1e-8 and dt < 1.0
    return ok, f"Love surrogate: v(0)=v_sub {v0 == stack.v_sub}, v(10) off v_layer by {near:.2e}, monotone {mono}, max residual {resid:.1e}, {dt * 1e3:.0f} ms"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("n", range(1, 9))
def test_acceptance(n):
    ok, detail = CRITERIA[n - 1]()
    assert _report(n, ok, detail), detail


if __name__ == "__main__":
    results = [_report(i + 1, *c()) for i, c in enumerate(CRITERIA)]
    sys.exit(0 if all(results) else 1)
