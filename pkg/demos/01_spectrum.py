"""The least eigenvalues of the deck and their modal constants.

The plate is the strip (0, pi) x (-ell, ell) with ell = pi/150, hinged on
the short edges and free on the long ones.  Run:  python demos/01_spectrum.py
"""

import math

from plate_modes.spectrum import (PlateGeometry, least_eigenvalues, solve_mu, sup_norm_of,
                                  tabulated_sup_norm)

geom = PlateGeometry()

# Twenty least eigenvalues: seventeen longitudinal and three torsional modes.
print("least eigenvalues")
for i, md in enumerate(least_eigenvalues(20, geom), 1):
    print(f"{i:3d}  {md.label:<10} sqrt(lambda) = {md.sqrt_lambda:9.4f}")

# Only odd-m longitudinal modes see a uniform load.  gamma_k is the load
# projection; the two amplitude weights differ by convention.
print("\nodd longitudinal modes")
print("  m   10*gamma   bound      weight   L-inf")
for m in range(1, 18, 2):
    md = solve_mu(m, 1, geom)
    bound = 4 / (m * math.sqrt(150))
    print(f"{m:3d}  {10 * md.gamma:8.5f}  {10 * bound:8.5f}  {tabulated_sup_norm(md):8.3f}  {sup_norm_of(md):6.3f}")
