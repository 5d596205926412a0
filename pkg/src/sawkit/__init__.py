"""Analysis toolkit for one-port RF acoustic resonators.

Touchstone I/O, S/Y conversion, multi-branch mBVD synthesis and fitting,
and extraction of f_s, f_p, kt2, Q_s, Bode-Q, Q_max, FoM, spurious modes
and P_1dB.
"""
from .dispersion import LayeredStack, VelocityPair, k_int2, kint2_curve, love_velocity
from .fitting import FitOptions, FitResult, fit, fit_sweep, seed_model
from .mbvd import MbvdModel, MotionalBranch, admittance, branch_resonance, synth_from_specs
from .metrics import (
    BodeQ,
    PowerSweep,
    ResonatorMetrics,
    bode_q,
    extract_metrics,
    find_fs_fp,
    fom,
    kt2_from_freqs,
    p1db,
    q_max_from_model,
    q_series_3db,
    spurious_census,
)
from .network import AdmittanceSweep, group_delay, s_to_y, y_to_s
from .touchstone import FrequencySweep, TouchstoneError, parse_touchstone, write_touchstone

__version__ = "0.1.0"
