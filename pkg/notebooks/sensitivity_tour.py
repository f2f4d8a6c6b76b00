"""Walk through the sensitivity pipeline for the two headline sensor settings.

Run with ``python3 notebooks/sensitivity_tour.py``.
"""

import math

from optograv.dynamics import ConstantCoupling, DriveSpec, ModulatedCoupling, NO_MODULATION, evolve
from optograv.params import SensorConfig, zero_point_fluctuation
from optograv.qfi import SqueezedCoherentState, optimal_squeeze_phase, photon_stats
from optograv.sensitivity import (delta_g0_fractional, delta_g0_resonant, gw_strain_bound,
                                  min_source_mass, qcrb_delta_g0)
from optograv.separability import FractionalFrequency, fractional_frequencies, k_na_squared

omega_m, mass, k0 = 2 * math.pi * 100, 1e-15, 0.1
mu, r = 250.0, 1.73
ps = photon_stats(SqueezedCoherentState(mu, r, optimal_squeeze_phase(mu)))
print(f"photon statistics: mean {ps.mean_n:.4e}, variance {ps.var_n:.4e}")

# resonant drive with constant coupling, ten mechanical periods
print(f"resonant, n=10:      dg0 = {delta_g0_resonant(10, k0, 0.0, 1.0, ps, 1, mass, omega_m):.3e} m/s^2")

# fractional frequency with s = 20 (Omega = 9/10) decouples at tau = 20 pi
ff = FractionalFrequency(-1, 20)
print(f"fractional, s=20:    dg0 = {delta_g0_fractional(20, k0, ps, 1, mass, omega_m):.3e} m/s^2")

# the same number from the numeric pipeline
f = evolve(DriveSpec(1.0, 0.0, 1.0, ff.omega_frac, 0.0), ModulatedCoupling(k0, ff.omega_frac),
           NO_MODULATION, ff.tau_sep).f
x0 = zero_point_fluctuation(SensorConfig(omega_m, mass))
print(f"  pipeline:          dg0 = {qcrb_delta_g0(4 * f.f_na**2 * ps.var_n, 1, x0, omega_m):.3e} m/s^2"
      f"  (|K|^2 = {float(k_na_squared(f)):.1e})")

dg = delta_g0_fractional(20, k0, ps, 1e4, mass, omega_m)
print(f"M = 1e4 repetitions: dg0 = {dg:.3e} m/s^2, smallest resolvable source mass "
      f"{min_source_mass(dg, 100e-6, 0.1) * 1e12:.0f} ng")

# gravitational-wave setting: omega_m = 10 rad/s, 10 m arm
ps2 = photon_stats(SqueezedCoherentState(600.0, 2.0, optimal_squeeze_phase(600.0)))
dg2 = delta_g0_fractional(20, 1.0, ps2, 10, 1e-10, 10.0)
print(f"strain bound:        dh  = {gw_strain_bound(dg2, 10.0, 10.0):.3e}")

print("\nfirst fractional frequencies (n1, s, Omega, decoupling time / pi):")
for ff in fractional_frequencies(6):
    print(f"  {ff.n1:+d} {ff.s:2d}  {str(ff.fraction):>5}  {ff.s}")
