"""Read a one-port sweep, look at it as admittance, and write it back out.

Run: python3 demos/01_touchstone_and_admittance.py
"""
import tempfile
from pathlib import Path

import numpy as np

from sawkit import FrequencySweep, parse_touchstone, s_to_y, synth_from_specs, write_touchstone
from sawkit.mbvd import admittance
from sawkit.network import group_delay, y_to_s

# A Touchstone file as a network analyser would save it: GHz, magnitude/angle.
text = """! one-port resonator, 50 ohm port
# GHz S MA R 50
6.40 0.9731 -35.1
6.50 0.6210 -70.8   ! close to series resonance
6.60 0.9473 -101.2
"""
sweep = parse_touchstone(text)
print("parsed", len(sweep), "points; first S11 =", np.round(sweep.s11[0], 4))

y = s_to_y(sweep)
print("conductance (mS):", np.round(1e3 * y.conductance, 3))

# A denser synthetic sweep of a single-mode resonator near 6.5 GHz.
model = synth_from_specs(6.531e9, 0.22, 330e-15, q=565, r_s=1.0, r_0=0.5)
freqs = np.linspace(6.2e9, 7.4e9, 4001)
s = y_to_s(admittance(model, freqs))

_, tau = group_delay(s)
i = int(np.argmax(tau))
print(f"group delay peaks at {freqs[i] / 1e9:.4f} GHz with {tau[i] * 1e9:.2f} ns")

# Every format round-trips to well below 1e-9.
with tempfile.TemporaryDirectory() as tmp:
    for fmt in ("RI", "MA", "DB"):
        path = Path(tmp) / f"dev_{fmt}.s1p"
        path.write_text(write_touchstone(s, fmt))
        back = parse_touchstone(path.read_text())
        print(f"{fmt}: max |dS| after round trip = {np.max(np.abs(back.s11 - s.s11)):.1e}")

# A sweep must be sorted; the parser says where it is not.
try:
    parse_touchstone("# MHz S RI R 50\n6500 0.1 0\n6400 0.1 0\n")
except ValueError as exc:
    print("rejected:", exc)

print(FrequencySweep([1e9], [0.5]).z_ref, "ohm default reference")
