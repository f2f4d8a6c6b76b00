"""Dimensionful sensitivity bounds, validity restrictions and systematics.

Converts Fisher information into bounds on the acceleration amplitude and
the gravitational-wave strain, inverts the source-mass signal, evaluates the
mechanical displacement and phonon number that limit the usable photon
number, and gives the sphere-sphere Casimir acceleration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from .dynamics import CouplingSpec, DriveSpec, FreqModSpec, NO_MODULATION, evolve
from .params import C_LIGHT, DomainError, G_NEWTON, HBAR
from .qfi import PhotonStats

TUNGSTEN_DENSITY = 19300.0  # kg / m^3
DEFAULT_SAFETY_FACTOR = 100.0


class Scheme(str, Enum):
    CONSTANT = "constant"
    RESONANT_COUPLING = "resonant_coupling"
    FRACTIONAL = "fractional"
    PARAMETRIC = "parametric"


@dataclass(frozen=True)
class MechanicalState:
    """Thermal mechanical state, optionally displaced by ``mu_m``."""

    r_T: float = 0.0
    mu_m: complex = 0.0

    def __post_init__(self):
        if self.r_T < 0:
            raise DomainError("r_T must be non-negative")


@dataclass(frozen=True)
class DisplacementStats:
    mean_x: float
    std_x: float


@dataclass(frozen=True)
class PhotonBounds:
    max_mean_n: float
    max_std_n: float

    def check(self, ps: PhotonStats, safety_factor: float = DEFAULT_SAFETY_FACTOR) -> bool:
        """``value * safety_factor <= ceiling`` for both mean and spread."""
        return (ps.mean_n * safety_factor <= self.max_mean_n
                and ps.std_n * safety_factor <= self.max_std_n)


@dataclass(frozen=True)
class SensitivityReport:
    delta_g0: float
    qfi_used: float
    measurements: float
    scheme: str
    validity: Dict[str, Optional[bool]] = field(default_factory=dict)


def _sqrt_factor(mass: float, omega_m: float) -> float:
    """``sqrt(2 hbar omega_m^3 / m)``, which equals ``2 x0 omega_m^2``."""
    return math.sqrt(2.0 * HBAR * omega_m**3 / mass)


def qcrb_delta_g0(qfi: float, M: float, x0: float, omega_m: float) -> float:
    """Cramer-Rao bound ``2 x0 omega_m^2 / sqrt(M I)``; ``inf`` when ``I = 0``."""
    if M < 1:
        raise DomainError("M must be at least 1")
    if qfi < 0:
        raise DomainError("QFI must be non-negative")
    if qfi == 0:
        return math.inf
    return 2.0 * x0 * omega_m**2 / math.sqrt(M * qfi)


def delta_g0_resonant(n: int, k0: float, a: float, epsilon: float, ps: PhotonStats, M: float,
                      mass: float, omega_m: float) -> float:
    """Bound for constant coupling and a resonant signal measured at ``tau = 2 pi n``."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return (1.0 / math.sqrt(M) / (4.0 * math.pi * n * k0 * (2 * a + epsilon))
            / math.sqrt(ps.var_n) * _sqrt_factor(mass, omega_m))


def delta_g0_fractional(s: int, k0: float, ps: PhotonStats, M: float, mass: float,
                        omega_m: float) -> float:
    """Bound for a coupling modulated at ``1 - 2/s`` and a purely oscillating signal."""
    if s < 3:
        raise DomainError("s must be at least 3")
    return (1.0 / math.sqrt(M) * 2.0 * (s - 1) / (math.pi * k0 * s**3)
            / math.sqrt(ps.var_n) * _sqrt_factor(mass, omega_m))


def gw_strain_bound(delta_g0: float, L: float, omega_m: float) -> float:
    """Strain bound ``2 delta_g0 / (L omega_m^2)``."""
    if not L > 0:
        raise DomainError("L must be positive")
    return 2.0 * delta_g0 / (L * omega_m**2)


def min_source_mass(delta_g0_osc: float, r0: float, delta_r0_ratio: float) -> float:
    """Smallest oscillating source mass resolvable at distance ``r0``.

    ``delta_r0_ratio`` is ``2 delta_r0 / r0``; the oscillating acceleration is
    ``delta_r0_ratio * G m_S / r0^2``.
    """
    if not (r0 > 0 and delta_r0_ratio > 0):
        raise DomainError("r0 and the oscillation ratio must be positive")
    return delta_g0_osc * r0**2 / (delta_r0_ratio * G_NEWTON)


def sphere_radius(mass: float, density: float = TUNGSTEN_DENSITY) -> float:
    return (3.0 * mass / (4.0 * math.pi * density)) ** (1.0 / 3.0)


def casimir_acceleration(m: float, R: float, r: float) -> float:
    """``161 hbar c R^6 / (4 pi m r^8)`` for two spheres of radius R at distance r."""
    if not r > 2 * R:
        raise DomainError(f"spheres overlap: r={r} <= 2R={2 * R}")
    return 161.0 * HBAR * C_LIGHT * R**6 / (4.0 * math.pi * m * r**8)


def gravitational_acceleration(m_source: float, r: float) -> float:
    return G_NEWTON * m_source / r**2


def _gamma_delta(ev):
    bp, f = ev.bogoliubov, ev.f
    ap, am = bp.alpha + bp.beta, bp.alpha - bp.beta
    gamma = ap * f.f_bm - 1j * am * f.f_bp
    delta = ap * f.f_nabm - 1j * am * f.f_nabp
    return gamma, delta


def displacement_stats(drive: DriveSpec, coupling: CouplingSpec, fm: FreqModSpec,
                       mech: MechanicalState, ps: PhotonStats, x0: float, tau,
                       cancel_photon_displacement: bool = False) -> DisplacementStats:
    """Mean and standard deviation of the mechanical position.

    The variance is ``x0^2 [|xi|^2 cosh(2 r_T) + 4 (Re Delta)^2 var_n]``, which
    reduces to the ground-state form for ``r_T = 0``.  With
    ``cancel_photon_displacement`` the part of the mean proportional to the
    photon number is removed, as an external linear potential would do.
    """
    ev = evolve(drive, coupling, fm, tau)
    bp = ev.bogoliubov
    gamma, delta = _gamma_delta(ev)
    mu = complex(mech.mu_m)
    photon = 0.0 if cancel_photon_displacement else delta * ps.mean_n
    mean = 2.0 * x0 * np.real(bp.alpha * mu + bp.beta * np.conj(mu) + gamma + photon)
    xi2 = np.abs(bp.xi) ** 2
    thermal = math.inf if math.isinf(mech.r_T) else math.cosh(2.0 * mech.r_T)
    var = x0**2 * (xi2 * thermal + 4.0 * np.real(delta) ** 2 * ps.var_n)
    return DisplacementStats(mean, np.sqrt(var))


def phonon_number(drive: DriveSpec, coupling: CouplingSpec, fm: FreqModSpec,
                  ps: PhotonStats, tau):
    """Phonon number for mechanics starting in its ground state."""
    ev = evolve(drive, coupling, fm, tau)
    gamma, delta = _gamma_delta(ev)
    bp = ev.bogoliubov
    n = (np.abs(bp.beta) ** 2 + np.abs(gamma) ** 2
         + 2.0 * np.real(np.conj(gamma) * delta) * ps.mean_n
         + np.abs(delta) ** 2 * ps.second_moment)
    return n


def photon_bounds(scheme, l: float, x0: float, k0: float, tau: float = 0.0, s: int = None,
                  d2: float = None) -> PhotonBounds:
    """Photon-number ceilings that keep the displacement below ``l``.

    ``s`` is required for the fractional scheme (``tau_sep = s pi`` unless
    ``tau`` is given) and ``d2`` for the parametric one.
    """
    if not (l > 0 and x0 > 0 and k0 > 0):
        raise DomainError("l, x0 and k0 must be positive")
    try:
        scheme = Scheme(scheme)
    except ValueError:
        raise DomainError(f"unknown scheme {scheme!r}") from None
    if scheme is Scheme.CONSTANT:
        c = l / (2.0 * x0 * k0)
    elif scheme is Scheme.RESONANT_COUPLING:
        if not tau > 0:
            raise DomainError("tau must be positive")
        c = l / (x0 * k0 * tau)
    elif scheme is Scheme.FRACTIONAL:
        tau_sep = tau if tau > 0 else (s * math.pi if s else 0.0)
        if not tau_sep > 0:
            raise DomainError("fractional scheme needs tau or s")
        c = math.pi * l / (x0 * k0 * tau_sep)
    else:
        if d2 is None:
            raise DomainError("parametric scheme needs d2")
        c = l / (2.0 * x0 * k0 * (1.0 + math.exp(d2 * tau)))
    return PhotonBounds(c, c)
