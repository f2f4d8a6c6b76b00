"""Compare the growth of the global QFI for the coupling and drive schemes.

Run with ``python3 notebooks/scheme_comparison.py``.
"""

import math

import numpy as np

from optograv.dynamics import ConstantCoupling, DriveSpec, FreqModSpec, ModulatedCoupling, NO_MODULATION
from optograv.qfi import PhotonStats, generator_coefficients, qfi_benchmark, qfi_global
from optograv.sensitivity import phonon_number

ps = PhotonStats(1.0, 1.0)
schemes = {
    "constant coupling, resonant drive": (DriveSpec(1.0, 0.0, 1.0, 1.0, math.pi),
                                          ConstantCoupling(1.0), NO_MODULATION),
    "doubly resonant": (DriveSpec(1.0, 0.0, 1.0, 1.0, math.pi / 2), ModulatedCoupling(1.0, 1.0),
                        NO_MODULATION),
    "fractional, Omega = 3/4": (DriveSpec(1.0, 0.0, 1.0, 0.75, 0.0), ModulatedCoupling(1.0, 0.75),
                                NO_MODULATION),
    "parametric, d2 = 0.02": (DriveSpec(1.0, 0.0, 1.0, 1.0, 0.0), ConstantCoupling(1.0),
                              FreqModSpec(0.02, 2.0, -math.pi / 2)),
}
periods = np.arange(1, 9)
tau = 2 * math.pi * periods
print("tau/2pi " + " ".join(f"{n:>10d}" for n in periods))
for name, (drive, coupling, fm) in schemes.items():
    q = qfi_global(generator_coefficients(drive, coupling, fm, tau), ps)
    print(f"{name}\n        " + " ".join(f"{v:10.3e}" for v in q))
print("benchmark\n        " + " ".join(f"{qfi_benchmark(n, 1.0, 1.0, ps):10.3e}" for n in periods))

print("\nphonons created by the light at tau = 2 pi n (constant coupling, no drive):")
print(phonon_number(DriveSpec(d1=0.0), ConstantCoupling(1.0), NO_MODULATION, ps, tau))
