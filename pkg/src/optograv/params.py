"""Physical constants, sensor parameters and SI to dimensionless conversions.

Everything downstream of this module works in the rescaled time
``tau = omega_m * t``.  SI units only appear here and in
:mod:`optograv.sensitivity`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

# CODATA 2018
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
G_NEWTON = 6.67430e-11  # m^3 kg^-1 s^-2
C_LIGHT = 299792458.0  # m / s
EPSILON_0 = 8.8541878128e-12  # F / m

# Sentinel for an infinitely hot mechanical bath.  ``thermal_parameter``
# maps it to ``r_T = inf`` and ``thermal_weight`` maps that to exactly 0.
INFINITE_TEMPERATURE = "infinite"


class DomainError(ValueError):
    """An input lies outside the domain where a formula is defined."""


class PreconditionError(ValueError):
    """An operation was called in a regime where its result is not valid."""


class NumericError(RuntimeError):
    """An integrator or consistency check failed to meet its tolerance."""

    def __init__(self, message: str, achieved: Optional[float] = None):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class SensorConfig:
    """Mechanical oscillator and cavity parameters in SI units.

    Parameters
    ----------
    omega_m : float
        Mechanical angular frequency (rad/s).
    mass : float
        Oscillator mass (kg).
    omega_c : float, optional
        Optical angular frequency (rad/s).
    cavity_length : float, optional
        Cavity length L (m).
    k0 : float, optional
        Dimensionless light-matter coupling.  If omitted and both
        ``omega_c`` and ``cavity_length`` are given, the Fabry-Perot formula
        is used (see :meth:`coupling`).
    """

    omega_m: float
    mass: float
    omega_c: Optional[float] = None
    cavity_length: Optional[float] = None
    k0: Optional[float] = None

    def __post_init__(self):
        if not self.omega_m > 0:
            raise DomainError(f"omega_m must be positive, got {self.omega_m}")
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if self.k0 is not None and self.k0 < 0:
            raise DomainError(f"k0 must be non-negative, got {self.k0}")

    @property
    def x0(self) -> float:
        return zero_point_fluctuation(self)

    def coupling(self) -> float:
        """Return ``k0``, deriving it from the Fabry-Perot formula if needed."""
        if self.k0 is not None:
            return self.k0
        if self.omega_c is None or self.cavity_length is None:
            raise DomainError("k0 not given and cannot be derived without omega_c and cavity_length")
        return coupling_fabry_perot(self.x0, self.omega_c, self.cavity_length, self.omega_m)


@dataclass(frozen=True)
class LevitatedParams:
    """Dielectric sphere in an optical cavity (SI units)."""

    volume: float
    relative_permittivity: float
    cavity_mode_volume: float
    wavelength: float

    def __post_init__(self):
        if not self.relative_permittivity >= 1:
            raise DomainError("relative permittivity must be >= 1")
        for name in ("volume", "cavity_mode_volume", "wavelength"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")


@dataclass(frozen=True)
class GravitySignal:
    """Gravitational acceleration g(t) = g0 (a + epsilon cos(omega_g t + phi_g))."""

    g0: float
    a: float = 0.0
    epsilon: float = 1.0
    omega_g: float = 0.0
    phi_g: float = 0.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise DomainError("epsilon must be non-negative")
        if self.a < 0:
            raise DomainError("a must be non-negative")


def zero_point_fluctuation(cfg: SensorConfig) -> float:
    """Zero-point fluctuation ``sqrt(hbar / (2 m omega_m))`` in metres."""
    if not (cfg.mass > 0 and cfg.omega_m > 0):
        raise DomainError("mass and omega_m must be positive")
    return math.sqrt(HBAR / (2.0 * cfg.mass * cfg.omega_m))


def coupling_fabry_perot(x0: float, omega_c: float, L: float, omega_m: float) -> float:
    """Dimensionless coupling ``x0 omega_c / (L omega_m)`` of a Fabry-Perot cavity."""
    if not L > 0:
        raise DomainError(f"cavity length must be positive, got {L}")
    if not omega_m > 0:
        raise DomainError("omega_m must be positive")
    if x0 < 0 or omega_c < 0:
        raise DomainError("x0 and omega_c must be non-negative")
    return x0 * omega_c / (L * omega_m)


def coupling_levitated(p: LevitatedParams, x0: float, omega_c: float, omega_m: float) -> float:
    """Dimensionless coupling of a levitated dielectric sphere.

    The polarizability is ``P = 3 V eps0 (eps - 1)/(eps + 2)`` and
    ``k0 = P k_c x0 omega_c / (2 omega_m V_c eps0)`` with ``k_c = 2 pi / lambda``.
    The vacuum permittivity cancels, so it is never evaluated.
    """
    if not omega_m > 0:
        raise DomainError("omega_m must be positive")
    eps = p.relative_permittivity
    k_c = 2.0 * math.pi / p.wavelength
    # P / eps0
    pol = 3.0 * p.volume * (eps - 1.0) / (eps + 2.0)
    return pol * k_c * x0 * omega_c / (2.0 * omega_m * p.cavity_mode_volume)


def d1_from_signal(sig: GravitySignal, cfg: SensorConfig):
    """Dimensionless drive for a gravitational signal.

    Returns
    -------
    DriveSpec
        With ``d1 = g0 / (2 x0 omega_m**2)``, ``omega_d1 = omega_g / omega_m``
        and ``phi_d1 = phi_g``.
    """
    from .dynamics import DriveSpec

    x0 = zero_point_fluctuation(cfg)
    return DriveSpec(
        d1=sig.g0 / (2.0 * x0 * cfg.omega_m**2),
        a=sig.a,
        epsilon=sig.epsilon,
        omega_d1=sig.omega_g / cfg.omega_m,
        phi_d1=sig.phi_g,
    )


def thermal_parameter(T: Union[float, str], omega_m: float) -> float:
    """Thermal parameter ``r_T = artanh(exp(-hbar omega_m / (2 k_B T)))``.

    ``T`` may be :data:`INFINITE_TEMPERATURE` (or ``math.inf``), which yields
    ``r_T = inf``.
    """
    if T == INFINITE_TEMPERATURE or (isinstance(T, float) and math.isinf(T) and T > 0):
        return math.inf
    T = float(T)
    if T < 0 or math.isnan(T):
        raise DomainError(f"temperature must be non-negative, got {T}")
    if not omega_m > 0:
        raise DomainError("omega_m must be positive")
    if T == 0:
        return 0.0
    x = HBAR * omega_m / (2.0 * K_B * T)
    if x == 0:
        return math.inf
    # artanh(e^-x) = 0.5 log((1 + e^-x)/(1 - e^-x)) = 0.5 log(coth(x/2))
    return 0.5 * math.log(1.0 / math.tanh(0.5 * x))


def thermal_weight(r_T: float) -> float:
    """``sech(2 r_T)``, exactly zero for the infinite-temperature sentinel."""
    if math.isinf(r_T):
        return 0.0
    if r_T < 0:
        raise DomainError("r_T must be non-negative")
    return 1.0 / math.cosh(2.0 * r_T)


def squeeze_from_db(S_dB: float) -> float:
    """Squeezing parameter ``r = S_dB / (20 log10 e)``."""
    if S_dB < 0:
        raise DomainError("S_dB must be non-negative")
    return S_dB / (20.0 * math.log10(math.e))


def db_from_squeeze(r: float) -> float:
    """Inverse of :func:`squeeze_from_db`."""
    return 20.0 * math.log10(math.e) * r
