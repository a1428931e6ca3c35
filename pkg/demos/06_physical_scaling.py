"""From deck dimensions and wind to the nondimensional model.

Numbers loosely modelled on a long-span steel deck; rho, C_L and St are
user inputs, not measured values.
"""

from plate_modes.physical import PhysicalParams, nondimensionalize, vortex_forcing

deck = PhysicalParams(L=853.0, ell=6.0, d=2.4, H=2.4, D=2.2e10, M=7200.0, E_young=2.1e11,
                      rho=1.25, W=19.0, C_L=0.7, St=0.12)
model = nondimensionalize(deck)
for name, value in model.to_dict().items():
    print(f"{name:14s} {value}")
amp, omega = vortex_forcing(deck.rho, deck.W, deck.H, deck.ell, deck.C_L, deck.St)
print(f"\nvortex lift amplitude {amp:.3f} N/m^2 at {omega:.3f} rad/s")
