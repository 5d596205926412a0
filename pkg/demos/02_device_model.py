"""Build a single-mode mBVD model from target specs and check it against itself.

The motional capacitance comes from kt2 = (pi^2/8) c_m / c_0. The series
and parallel resonances of the resulting circuit then give kt2 back through
kt2 = (pi^2/8) (f_p^2 - f_s^2) / f_s^2. The two routes should agree.

Run: python3 demos/02_device_model.py
"""
import numpy as np

from sawkit import admittance, branch_resonance, find_fs_fp, kt2_from_freqs, synth_from_specs

model = synth_from_specs(f_s=6.531e9, kt2=0.22, c_0=330e-15, q=565)
branch = model.branches[0]
print(f"c_m = {branch.c_m * 1e15:.2f} fF, l_m = {branch.l_m * 1e9:.3f} nH, r_m = {branch.r_m:.3f} ohm")

f_s, q = branch_resonance(branch)
print(f"branch resonance {f_s / 1e9:.4f} GHz, branch Q {q:.0f}")

freqs = np.linspace(6.3e9, 7.3e9, 20001)
ysw = admittance(model, freqs)
f_s_num, f_p_num = find_fs_fp(ysw)
print(f"numerical f_s = {f_s_num / 1e9:.5f} GHz, f_p = {f_p_num / 1e9:.5f} GHz")
print(f"kt2 from the frequencies: {kt2_from_freqs(f_s_num, f_p_num):.5f} (target 0.22)")

# f_p from the measured table for the same device is 7.090 GHz.
print(f"f_p offset from 7.090 GHz: {(f_p_num / 7.090e9 - 1):+.4%}")

# The model stores and reloads losslessly.
print(model.to_json())
