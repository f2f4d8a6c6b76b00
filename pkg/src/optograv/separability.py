"""Disentangling of light and mechanics.

A product initial state returns to a product state whenever
``|K|^2 = F_NaB-^2 + F_NaB+^2`` vanishes.  This is a sufficient condition;
the functions here report "separable by criterion" and never claim
entanglement when it fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np

from .dynamics import (DriveSpec, FCoefficients, ModulatedCoupling, NO_MODULATION,
                       f_coefficients_modulated, f_coefficients_numeric)
from .params import DomainError

SEPARABILITY_TOL = 1e-12


@dataclass(frozen=True)
class FractionalFrequency:
    """Modulation frequency ``1 + 2 n1 / s`` with disentangling time ``s pi``."""

    n1: int
    s: int

    def __post_init__(self):
        if self.n1 == 0:
            raise DomainError("n1 must be non-zero")
        if self.s < 1:
            raise DomainError("s must be a positive integer")
        if not 2 * self.n1 > -self.s:
            raise DomainError("n1 > -s/2 is required for a positive frequency")
        if math.gcd(abs(self.n1), self.s) != 1:
            raise DomainError(f"(n1, s) = ({self.n1}, {self.s}) is not in lowest terms")

    @property
    def omega_frac(self) -> float:
        return 1.0 + 2.0 * self.n1 / self.s

    @property
    def fraction(self) -> Fraction:
        return 1 + Fraction(2 * self.n1, self.s)

    @property
    def tau_sep(self) -> float:
        return self.s * math.pi


def k_na_squared(f: FCoefficients):
    """``F_NaB-^2 + F_NaB+^2``."""
    return np.asarray(f.f_nabm) ** 2 + np.asarray(f.f_nabp) ** 2


def is_separable(f: FCoefficients, k0: float):
    """True where ``|K|^2 < 1e-12 max(k0^2, 1)``."""
    return k_na_squared(f) < SEPARABILITY_TOL * max(k0 * k0, 1.0)


def fractional_frequencies(s_max: int, omega_max: float = 3.0) -> List[FractionalFrequency]:
    """Canonical fractional frequencies with ``1 <= s <= s_max``, sorted by (s, n1).

    Positive ``n1`` is unbounded, so the list is cut at ``omega_frac <= omega_max``.
    """
    if s_max < 3:
        raise DomainError("s_max must be at least 3")
    out = []
    for s in range(1, s_max + 1):
        n1_max = math.floor((omega_max - 1.0) * s / 2.0 + 1e-12)
        for n1 in range(-((s - 1) // 2), n1_max + 1):
            if n1 != 0 and math.gcd(abs(n1), s) == 1:
                out.append(FractionalFrequency(n1, s))
    return out


def verify_decoupling(ff: FractionalFrequency, k0: float, q: int, phi_k: float = 0.0,
                      numeric: bool = False) -> bool:
    """Check that the modulated coupling at ``ff`` disentangles at ``tau = q s pi``."""
    if q < 1:
        raise DomainError("q must be a positive integer")
    tau = q * ff.tau_sep
    null_drive = DriveSpec(d1=0.0)
    if numeric:
        f = f_coefficients_numeric(null_drive, ModulatedCoupling(k0, ff.omega_frac, phi_k),
                                   NO_MODULATION, tau)
    else:
        f = f_coefficients_modulated(k0, ff.omega_frac, phi_k, null_drive, tau)
    return bool(is_separable(f, k0))
