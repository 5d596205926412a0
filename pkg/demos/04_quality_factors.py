"""Series Q, Bode-Q and Q_max, and how a series resistance eats into them.

Run: python3 demos/04_quality_factors.py
"""
import numpy as np

from sawkit import admittance, extract_metrics, find_fs_fp, q_series_3db, synth_from_specs
from sawkit.metrics import model_bode_q, q_max_from_model
from sawkit.network import y_to_s

f_s = 6.531e9
freqs = np.linspace(6.0e9, 7.5e9, 8001)

print(f"{'r_s (ohm)':>10} {'Q_s':>8} {'Q_max':>8}")
for r_s in (0.0, 1.0, 2.5, 7.5):
    model = synth_from_specs(f_s, 0.22, 330e-15, q=565, r_s=r_s, r_0=1.0)
    ysw = admittance(model, freqs)
    q_s = q_series_3db(ysw, find_fs_fp(ysw)[0])
    print(f"{r_s:10.1f} {q_s:8.1f} {q_max_from_model(model):8.1f}")

# Bode-Q follows the branch Q near f_s and rises towards f_p.
model = synth_from_specs(f_s, 0.22, 330e-15, q=500)
bq = model_bode_q(model)
for f in (6.531e9, 6.8e9, 7.05e9):
    i = int(np.argmin(np.abs(bq.freqs - f)))
    print(f"Bode-Q at {bq.freqs[i] / 1e9:.3f} GHz: {bq.q[i]:.0f}")

# Everything at once for a device with a 1 ohm static-branch loss.
model = synth_from_specs(f_s, 0.22, 330e-15, q=565, r_s=0.5, r_0=1.0)
metrics = extract_metrics(y_to_s(admittance(model, freqs)), model)
for k, v in metrics.to_dict().items():
    print(f"{k:>9}: {v}")
