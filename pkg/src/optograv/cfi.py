"""Classical Fisher information of homodyne and heterodyne detection.

All formulas assume a disentangling time at which ``F_Na2`` is a multiple of
2 pi, so that the cavity is left in a (rotated) coherent or squeezed-coherent
state.  Use :func:`is_kerr_trivial` to check that condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import NumericError


@dataclass(frozen=True)
class HomodyneSetting:
    """Local-oscillator phase of the measured quadrature."""

    lam: float

    @property
    def wrapped(self) -> float:
        return float(np.mod(self.lam, 2 * math.pi))


@dataclass(frozen=True)
class RotatedAmplitude:
    mu_tilde: complex
    varphi_tilde: float = 0.0


def rotate_amplitude(mu_c: complex, varphi: float, f_na: float) -> RotatedAmplitude:
    """Phase rotation ``mu -> mu exp(-i F_Na)``, ``varphi -> varphi - 2 F_Na``."""
    return RotatedAmplitude(complex(mu_c) * np.exp(-1j * f_na), varphi - 2.0 * f_na)


def is_kerr_trivial(f_na2: float, tol: float = 1e-6) -> bool:
    """True if ``F_Na2`` is an integer multiple of 2 pi within ``tol``."""
    x = f_na2 / (2 * math.pi)
    return abs(x - round(x)) * 2 * math.pi < tol


def optimal_lo_phase(ra: RotatedAmplitude) -> float:
    """Local-oscillator phase maximizing the coherent homodyne CFI."""
    return float(np.angle(ra.mu_tilde) - 0.5 * math.pi)


def cfi_homodyne_coherent(b: float, ra: RotatedAmplitude, h: HomodyneSetting) -> float:
    """``4 B^2 Im(mu~ exp(-i lambda))^2``."""
    return 4.0 * b**2 * (ra.mu_tilde * np.exp(-1j * h.lam)).imag ** 2


def cfi_homodyne_squeezed(b: float, ra: RotatedAmplitude, r: float,
                          h: HomodyneSetting = None, optimal: bool = True) -> float:
    """Homodyne CFI for a squeezed probe.

    ``optimal=True`` returns ``4 B^2 |mu|^2 e^{4r}``, valid when the squeezing
    and local-oscillator phases are matched to the amplitude.  ``optimal=False``
    evaluates the vacuum (``mu = 0``) contribution at LO phase ``h.lam``.
    """
    if optimal:
        return 4.0 * b**2 * abs(ra.mu_tilde) ** 2 * math.exp(4.0 * r)
    if h is None:
        raise ValueError("the vacuum branch needs a homodyne setting")
    x = ra.varphi_tilde - 2.0 * h.lam
    num = 2.0 * math.sinh(2 * r) ** 2 * math.sin(x) ** 2
    den = (math.cosh(2 * r) - math.sinh(2 * r) * math.cos(x)) ** 2
    return b**2 * num / den


def vacuum_optimal_angle(r: float) -> float:
    """A value of ``varphi~ - 2 lambda`` maximizing the vacuum homodyne CFI."""
    return 2.0 * math.atan(math.exp(-2.0 * r))


def cfi_heterodyne_coherent(b: float, mu_c: complex) -> float:
    """``2 B^2 |mu|^2``, half the cavity QFI."""
    return 2.0 * b**2 * abs(mu_c) ** 2


def cfi_heterodyne_squeezed(b: float, ra: RotatedAmplitude, r: float) -> float:
    """Heterodyne CFI for a squeezed-coherent probe."""
    m2 = abs(ra.mu_tilde) ** 2
    w = (np.exp(-0.5j * ra.varphi_tilde) * ra.mu_tilde).real
    sech = 1.0 / math.cosh(r)
    val = 2.0 * b**2 * (m2 * math.exp(3 * r) * sech + 2 * math.sinh(r) ** 2
                        - 2 * w**2 * math.sinh(3 * r) * sech)
    if val < -1e-12 * max(1.0, 2.0 * b**2 * m2 * math.exp(3 * r)):
        raise NumericError(f"heterodyne CFI evaluated negative ({val})")
    return max(val, 0.0)
