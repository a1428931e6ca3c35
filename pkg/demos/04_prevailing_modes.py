"""Which longitudinal mode dominates the linear response to a uniform load.

Each odd mode behaves like a damped oscillator; the one with the largest
weighted resonance amplitude at the forcing frequency prevails.
"""

from plate_modes.prevailing import prevailing_intervals, symmetric_mode_table, wind_to_frequency

table = symmetric_mode_table()
for P in (0.0, 0.5):
    print(f"P = {P}")
    for lo, hi, k in prevailing_intervals(P, 0.58, table, 260.0):
        print(f"  ({lo:7.2f}, {hi:7.2f}) -> mode {k}")

# A wind of 20 m/s on a 1.2 m high section with Strouhal number 0.12.
print("\nshedding frequency:", wind_to_frequency(20.0, 0.12, 1.2))
