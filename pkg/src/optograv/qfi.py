"""Quantum Fisher information for estimating the drive amplitude d1.

The generator of a d1 shift is ``B N_a + C+ B+ + C- B-`` with

    B  = -dF_Na/dd1 - 2 F_NaB- dF_B+/dd1,
    C+ = -dF_B+/dd1,   C- = -dF_B-/dd1.

Every d1-dependent F coefficient is linear in d1, so the derivatives are the
coefficients themselves evaluated at ``d1 = 1``.  For a cavity state with
photon-number variance ``var_n`` and a thermal mechanical state the QFI is

    I = 4 [B^2 var_n + sech(2 r_T) (C+^2 + C-^2)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .dynamics import (ConstantCoupling, CouplingSpec, DriveSpec, FCoefficients, FreqModSpec,
                       NO_MODULATION, RESONANCE_SWITCH, evolve)
from .params import DomainError, PreconditionError, thermal_weight
from .separability import FractionalFrequency, is_separable, k_na_squared


@dataclass(frozen=True)
class CoherentState:
    mu: complex


@dataclass(frozen=True)
class SqueezedCoherentState:
    """``S(zeta)|mu>`` with ``zeta = r exp(i varphi)``."""

    mu: complex
    r: float
    varphi: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise DomainError("squeezing r must be non-negative")


CavityState = Union[CoherentState, SqueezedCoherentState]


@dataclass(frozen=True)
class PhotonStats:
    mean_n: float
    var_n: float

    @property
    def second_moment(self) -> float:
        return self.var_n + self.mean_n**2

    @property
    def std_n(self) -> float:
        return math.sqrt(self.var_n)


@dataclass(frozen=True)
class GeneratorCoefficients:
    b: Union[float, np.ndarray]
    c_plus: Union[float, np.ndarray]
    c_minus: Union[float, np.ndarray]


def optimal_squeeze_phase(mu: complex) -> float:
    """Squeezing phase that makes ``exp(-i varphi/2) mu`` purely imaginary."""
    return float(np.mod(2.0 * np.angle(mu) - np.pi, 2.0 * np.pi))


def photon_stats(state: CavityState) -> PhotonStats:
    """Mean and variance of the photon number."""
    mu = complex(state.mu)
    m2 = abs(mu) ** 2
    if isinstance(state, CoherentState):
        return PhotonStats(m2, m2)
    r = state.r
    w = (np.exp(-0.5j * state.varphi) * mu).real
    mean = m2 * math.exp(2 * r) + math.sinh(r) ** 2 - 2 * w**2 * math.sinh(2 * r)
    var = (m2 * math.exp(4 * r) + 0.5 * math.sinh(2 * r) ** 2
           - 2 * w**2 * math.sinh(4 * r))
    return PhotonStats(mean, var)


def generator_from_unit(f_unit: FCoefficients) -> GeneratorCoefficients:
    """Generator coefficients from F coefficients computed at ``d1 = 1``."""
    return GeneratorCoefficients(
        b=-f_unit.f_na - 2.0 * f_unit.f_nabm * f_unit.f_bp,
        c_plus=-f_unit.f_bp,
        c_minus=-f_unit.f_bm,
    )


def generator_coefficients(drive: DriveSpec, coupling: CouplingSpec,
                           fm: FreqModSpec = NO_MODULATION, tau=0.0) -> GeneratorCoefficients:
    """B and C+- by the numeric pipeline.  Independent of ``drive.d1``."""
    return generator_from_unit(evolve(drive.unit(), coupling, fm, tau).f)


def qfi_global(gc: GeneratorCoefficients, ps: PhotonStats, r_T: float = math.inf):
    """Global QFI of the joint light-mechanics state."""
    if ps.var_n < 0:
        raise DomainError("photon-number variance must be non-negative")
    sech = thermal_weight(r_T)
    thermal = 0.0 if sech == 0.0 else sech * (np.square(gc.c_plus) + np.square(gc.c_minus))
    return 4.0 * (np.square(gc.b) * ps.var_n + thermal)


def qfi_local_cavity(drive: DriveSpec, coupling: CouplingSpec, fm: FreqModSpec, tau_sep: float,
                     ps: PhotonStats) -> float:
    """QFI of the cavity state alone, ``4 (dF_Na/dd1)^2 var_n``.

    Only defined where light and mechanics are separable.
    """
    f = evolve(drive.unit(), coupling, fm, tau_sep).f
    if not is_separable(f, coupling.scale):
        raise PreconditionError(
            f"state not separable at tau={tau_sep}: |K|^2 = {float(k_na_squared(f)):.3e}")
    return float(4.0 * f.f_na**2 * ps.var_n)


def _thermal(r_T):
    return thermal_weight(r_T)


def qfi_benchmark(n: float, k0: float, epsilon: float, ps: PhotonStats) -> float:
    """Cavity QFI ``(4 pi n)^2 k0^2 eps^2 var_n`` for a resonant oscillating signal
    with constant coupling at ``tau = 2 pi n``."""
    return (4.0 * math.pi * n) ** 2 * k0**2 * epsilon**2 * ps.var_n


def qfi_resonant_periodic(n: int, k0: float, drive: DriveSpec, ps: PhotonStats,
                          r_T: float = math.inf) -> float:
    """Constant coupling, resonant drive, at ``tau = 2 pi n``."""
    a, eps, p = drive.a, drive.epsilon, drive.phi_d1
    return (16.0 * math.pi**2 * n**2 * k0**2 * ps.var_n * (2 * a - eps * math.cos(p)) ** 2
            + (2 * math.pi * n) ** 2 * eps**2 * _thermal(r_T))


def qfi_resonant_closed(k0: float, drive: DriveSpec, tau, ps: PhotonStats,
                        r_T: float = math.inf):
    """Constant coupling and resonant drive at arbitrary ``tau``."""
    if abs(drive.omega_d1 - 1.0) > 1e-12:
        raise DomainError("resonant closed form requires omega_d1 = 1")
    a, eps, p = drive.a, drive.epsilon, drive.phi_d1
    t = np.asarray(tau, dtype=float)
    s, c = np.sin, np.cos
    cav = k0**2 * ps.var_n * (-4 * a * (t - s(t))
                              + eps * (2 * t * c(p) - 4 * s(t + p) + s(2 * t + p) + 3 * s(p))) ** 2
    mech = 0.25 * _thermal(r_T) * (
        4 * (t * eps * c(p) + s(t) * (eps * c(t + p) + 2 * a)) ** 2
        + (2 * t * eps * s(p) + eps * c(2 * t + p) - eps * c(p) + 4 * a * (c(t) - 1)) ** 2)
    return cav + mech


def qfi_doubly_resonant(k0: float, phi_k: float, drive: DriveSpec, tau, ps: PhotonStats,
                        r_T: float = math.inf):
    """Coupling and drive both modulated at the mechanical frequency, arbitrary ``tau``."""
    if abs(drive.omega_d1 - 1.0) > 1e-12:
        raise DomainError("doubly resonant closed form requires omega_d1 = 1")
    a, eps, p, pk = drive.a, drive.epsilon, drive.phi_d1, phi_k
    t = np.asarray(tau, dtype=float)
    s, c = np.sin, np.cos
    bracket = (4 * a * s(t - pk) - 12 * a * s(t + pk) + 8 * a * t * c(t + pk) + 16 * a * s(pk)
               + 2 * t**2 * eps * s(p - pk) + eps * s(2 * t - pk + p) - 2 * eps * s(2 * t + pk + p)
               - 2 * t * eps * c(p - pk) + 2 * t * eps * c(pk + p) + 2 * t * eps * c(2 * t + pk + p)
               - eps * s(p - pk) + 2 * eps * s(pk + p))
    cav = k0**2 * ps.var_n / 16.0 * bracket**2
    mech = 0.25 * _thermal(r_T) * (
        4 * (s(t) * (2 * a + eps * c(t + p)) + t * eps * c(p)) ** 2
        + (4 * a * c(t) - 4 * a + 2 * t * eps * s(p) + eps * c(2 * t + p) - eps * c(p)) ** 2)
    return cav + mech


def qfi_doubly_resonant_periodic(n: int, k0: float, phi_k: float, drive: DriveSpec,
                                 ps: PhotonStats, r_T: float = math.inf) -> float:
    """Doubly resonant QFI at ``tau = 2 pi n``."""
    a, eps, p, pk = drive.a, drive.epsilon, drive.phi_d1, phi_k
    inner = 4 * a * math.cos(pk) + eps * (2 * math.pi * n * math.sin(p - pk)
                                          + 2 * math.cos(p + pk) - math.cos(p - pk))
    return (math.pi**2 * n**2 * k0**2 * ps.var_n * inner**2
            + (2 * math.pi * n) ** 2 * eps**2 * _thermal(r_T))


def qfi_doubly_resonant_optimal(n: int, k0: float, epsilon: float, ps: PhotonStats) -> float:
    """``4 pi^4 n^4 k0^2 eps^2 var_n`` (a = 0, phi_d1 - phi_k = pi/2, r_T = inf)."""
    return 4.0 * math.pi**4 * n**4 * k0**2 * epsilon**2 * ps.var_n


def qfi_same_frequency(k0: float, omega: float, phi_k: float, drive: DriveSpec, tau,
                       ps: PhotonStats, r_T: float = math.inf):
    """Coupling and drive modulated at a common frequency ``omega``."""
    if abs(drive.omega_d1 - omega) > 1e-12:
        raise DomainError("drive frequency must equal the coupling frequency")
    if abs(omega - 1.0) <= RESONANCE_SWITCH:
        return qfi_doubly_resonant(k0, phi_k, replace(drive, omega_d1=1.0), tau, ps, r_T)
    a, eps, p, pk, O = drive.a, drive.epsilon, drive.phi_d1, phi_k, omega
    t = np.asarray(tau, dtype=float)
    s, c = np.sin, np.cos
    br = (-2 * a * O**4 * s(t + pk) - 2 * a * O**3 * s(t + pk) + 2 * a * O**2 * s(t + pk)
          + 4 * a * O**2 * s(t * O + pk) + 2 * a * (O - 1) ** 2 * (O + 1) * O * s(t - pk)
          + 2 * a * O * s(t + pk) - 4 * a * s(t * O + pk)
          + 4 * a * O**4 * s(pk) - 8 * a * O**2 * s(pk) + 4 * a * s(pk)
          + O**3 * eps * s(t * O + t - pk + p) - O**3 * eps * s(t * O + t + pk + p)
          - O**3 * eps * s(-t * O + t - pk - p) + O**3 * eps * s(-t * O + t + pk - p)
          - 2 * O**2 * eps * s(t * O + t - pk + p)
          + O**2 * eps * s(2 * t * O + pk + p) + 2 * O**2 * eps * s(-t * O + t + pk - p)
          + 2 * t * (O**2 - 1) * O * eps * c(p - pk)
          + O * eps * s(t * O + t - pk + p) + O * eps * s(t * O + t + pk + p)
          + O * eps * s(-t * O + t - pk - p)
          + O * eps * s(-t * O + t + pk - p) - eps * s(2 * t * O + pk + p)
          + 4 * O**2 * eps * s(p - pk) - O**2 * eps * s(pk + p) + eps * s(pk + p))
    cav = k0**2 * ps.var_n / (O**2 * (O**2 - 1) ** 4) * br**2
    mech = 4 * _thermal(r_T) * (
        (-a * c(t) + a + eps * (O * s(t) * s(t * O + p) + c(t) * c(t * O + p) - c(p)) / (O**2 - 1)) ** 2
        + (s(t) * (a * (O**2 - 1) - eps * c(t * O + p))
           + O * eps * (s(p) * (c(t) * c(t * O) - 1) + c(t) * c(p) * s(t * O))) ** 2 / (O**2 - 1) ** 2)
    return cav + mech


def qfi_fractional_at_sep(ff: FractionalFrequency, q: int, k0: float, phi_k: float,
                          drive: DriveSpec, ps: PhotonStats, r_T: float = math.inf,
                          local: bool = False) -> float:
    """QFI at the disentangling time ``tau = q s pi`` of a fractional frequency.

    With ``local=True`` only the cavity term is returned, which is the QFI of
    the (then separable) optical state.
    """
    if q < 1:
        raise DomainError("q must be a positive integer")
    if abs(drive.omega_d1 - ff.omega_frac) > 1e-12:
        raise DomainError("drive frequency must equal the fractional frequency")
    n1, s = ff.n1, ff.s
    a, eps, p, pk = drive.a, drive.epsilon, drive.phi_d1, phi_k
    par = (-1) ** (q * s) - 1
    cav = (k0**2 * ps.var_n * s**2 / (4 * n1**2 * (n1 + s) ** 2 * (2 * n1 + s) ** 2)
           * (math.pi * q * s**2 * eps * (2 * n1 + s) * math.cos(p - pk)
              - 8 * a * n1 * (n1 + s) * par * math.sin(pk)) ** 2)
    if local:
        return cav
    return cav + 4 * a**2 * par**2 * _thermal(r_T)


def qfi_fractional_optimal(s: int, k0: float, epsilon: float, ps: PhotonStats) -> float:
    """``pi^2 k0^2 eps^2 s^6 var_n / (4 (1 - s)^2)`` for ``n1 = -1``, ``q = 1``, ``a = 0``
    and ``phi_d1 = phi_k``."""
    return math.pi**2 * k0**2 * epsilon**2 * s**6 * ps.var_n / (4.0 * (1 - s) ** 2)


def qfi_parametric(k0: float, epsilon: float, d2: float, tau, ps: PhotonStats):
    """Approximate QFI under parametric modulation (``omega_d2 = 2``), for
    ``a = 0``, ``phi_d1 = 0``, ``phi_d2 = -pi/2`` and ``r_T = inf``."""
    if abs(d2) >= 0.5:
        raise DomainError("|d2| must be below 0.5")
    if d2 == 0:
        raise DomainError("d2 = 0 has no parametric enhancement; use the resonant forms")
    t = np.asarray(tau, dtype=float)
    E = np.exp(d2 * t)
    s, c = np.sin, np.cos
    br = (6 * (E - 1) ** 2 / d2**2 - 15 * (E - 1) ** 2 + 6 * s(t) ** 2 * (E * c(t) - 2) ** 2
          + 12 * (E - 1) * s(t) * (E * c(t) - 2) / d2
          + (E - 1) * ((9 * c(2 * t) + 3) * np.sinh(d2 * t) + 6 * s(t) ** 2 * np.cosh(d2 * t)
                       + 16 * (c(t) ** 3 - 1)))
    return 2.0 / 3.0 * k0**2 * epsilon**2 * ps.var_n * br


def qfi_parametric_dominant(k0: float, epsilon: float, d2: float, tau, ps: PhotonStats):
    """Leading term ``4 k0^2 eps^2 (exp(d2 tau) - 1)^2 / d2^2 var_n``."""
    t = np.asarray(tau, dtype=float)
    g = t if d2 == 0 else np.expm1(d2 * t) / d2
    return 4.0 * k0**2 * epsilon**2 * g**2 * ps.var_n


def qfi_phase_map(phi_d2: Sequence[float], phi_d1: Sequence[float], k0: float, d2: float,
                  tau: float, ps: PhotonStats, r_T: float = math.inf, epsilon: float = 1.0,
                  coupling: Optional[CouplingSpec] = None) -> np.ndarray:
    """Global QFI over a grid of (phi_d2, phi_d1) for ``a = 0``, ``omega_d1 = 1``,
    ``omega_d2 = 2``.  Rows follow ``phi_d2``, columns ``phi_d1``.

    The generator is linear in the drive, and
    ``cos(x + phi) = cos(phi) cos(x) + sin(phi) cos(x + pi/2)``, so each row
    needs two integrations instead of one per grid cell.
    """
    phi_d2 = np.asarray(phi_d2, dtype=float)
    phi_d1 = np.asarray(phi_d1, dtype=float)
    coupling = ConstantCoupling(k0) if coupling is None else coupling
    cp, sp = np.cos(phi_d1), np.sin(phi_d1)
    out = np.empty((phi_d2.size, phi_d1.size))
    for i, p2 in enumerate(phi_d2):
        fm = FreqModSpec(d2, 2.0, float(p2))
        gens = [generator_coefficients(DriveSpec(1.0, 0.0, epsilon, 1.0, ph), coupling, fm, tau)
                for ph in (0.0, 0.5 * math.pi)]
        g = GeneratorCoefficients(
            b=cp * gens[0].b + sp * gens[1].b,
            c_plus=cp * gens[0].c_plus + sp * gens[1].c_plus,
            c_minus=cp * gens[0].c_minus + sp * gens[1].c_minus,
        )
        out[i] = qfi_global(g, ps, r_T)
    return out
