"""Put six devices on one figure-of-merit scale.

Coupling is recomputed from each device's (f_s, f_p) so that every entry
uses the same kt2 definition before multiplying by Q_max.

Run: python3 demos/05_survey_fom.py
"""
from sawkit.devices import REPORTED_DEVICES, SurveyEntry, compare_survey, reported_survey, write_survey_table
from sawkit.metrics import fom

rows = compare_survey(reported_survey() + [SurveyEntry("example BAW", "FBAR", 2.0e9, 2.06e9, 2500)])
print(write_survey_table(rows))

print("published kt2 x Q_max against the listed FoM:")
for name, d in REPORTED_DEVICES.items():
    value = fom(d.kt2_percent / 100, d.q_max)
    flag = "" if round(value) == d.fom else "  <- rounds differently"
    print(f"  {name}: {d.kt2_percent:.1f}% x {d.q_max:.0f} = {value:7.2f}  listed {d.fom}{flag}")
