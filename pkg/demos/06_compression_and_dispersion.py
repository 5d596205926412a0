"""Two side quantities: the 1 dB compression point and a Love-wave k_int^2 curve.

Run: python3 demos/06_compression_and_dispersion.py
"""
import math

import numpy as np

from sawkit import LayeredStack, PowerSweep, kint2_curve, love_velocity, p1db

# Soft limiter placed so that it compresses by 1 dB at +11.6 dBm.
p_in = np.arange(-15.0, 13.01, 0.5)
s = 2.0
p_sat = 11.6 - (10 / s) * math.log10(10 ** (s / 10) - 1)
response = p_in - (10 / s) * np.log10(1 + 10 ** (s * (p_in - p_sat) / 10))
print("P_1dB of the soft limiter:", round(p1db(PowerSweep(p_in, response)), 3), "dBm")

# A device that stays linear up to the highest power reports "not found".
print("P_1dB of a linear response:", p1db(PowerSweep(p_in, p_in - 3.0)))

# Slow shear layer on a fast substrate; the "short" surface is a little slower.
open_stack = LayeredStack(v_layer=3600.0, mu_layer=6.1e10, v_sub=7100.0, mu_sub=1.62e11)
short_stack = LayeredStack(v_layer=3420.0, mu_layer=6.1e10, v_sub=7100.0, mu_sub=1.62e11)
print(f"{'h/lambda':>8} {'v_open':>9} {'k_int^2':>8}")
for h, k in kint2_curve(open_stack, short_stack, [0.05, 0.1, 0.2, 0.4, 0.8, 1.6]):
    print(f"{h:8.2f} {love_velocity(open_stack, h):9.1f} {k:8.4f}")
