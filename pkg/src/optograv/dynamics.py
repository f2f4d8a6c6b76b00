"""Decoupled time evolution: Bogoliubov pair, xi, and the F and J coefficients.

Two routes are provided.  The numeric route integrates the mechanical
equations together with every F integral in a single adaptive Runge-Kutta
pass and works for any coupling k(tau), drive D1(tau) and frequency
modulation D2(tau).  The closed-form routes cover constant and modulated
couplings without frequency modulation, and the two-timescale solution of
the Mathieu equation.

The mechanical solutions obey

    y'' + (1 + 4 D2(tau)) y = 0,

with P11(0) = 1, P11'(0) = 0 and IP22(0) = 0, IP22'(0) = 1.  In terms of
these, ``xi = alpha + conj(beta) = P11 - 1j * IP22``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .params import DomainError, NumericError

RTOL = 1e-12
ATOL = 1e-14

# below this distance from resonance the (Omega^2 - 1)^-1 closed forms are
# replaced by a cancellation-free rearrangement
RESONANCE_SWITCH = 1e-6

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class DriveSpec:
    """Linear mechanical drive ``D1(tau) = -d1 (a + epsilon cos(omega_d1 tau + phi_d1))``."""

    d1: float = 1.0
    a: float = 0.0
    epsilon: float = 1.0
    omega_d1: float = 1.0
    phi_d1: float = 0.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise DomainError("epsilon must be non-negative")

    def __call__(self, tau: ArrayLike) -> ArrayLike:
        return -self.d1 * (self.a + self.epsilon * np.cos(self.omega_d1 * tau + self.phi_d1))

    def unit(self) -> "DriveSpec":
        """The same drive with ``d1 = 1`` (the d1-derivative of every linear F)."""
        return replace(self, d1=1.0)


@dataclass(frozen=True)
class ConstantCoupling:
    k0: float

    def __post_init__(self):
        if self.k0 < 0:
            raise DomainError("k0 must be non-negative")

    def __call__(self, tau: ArrayLike) -> ArrayLike:
        return self.k0 + 0.0 * np.asarray(tau, dtype=float)

    @property
    def scale(self) -> float:
        return self.k0


@dataclass(frozen=True)
class ModulatedCoupling:
    """``k(tau) = k0 cos(omega_k tau + phi_k)``."""

    k0: float
    omega_k: float
    phi_k: float = 0.0

    def __post_init__(self):
        if self.k0 < 0:
            raise DomainError("k0 must be non-negative")

    def __call__(self, tau: ArrayLike) -> ArrayLike:
        return self.k0 * np.cos(self.omega_k * tau + self.phi_k)

    @property
    def scale(self) -> float:
        return self.k0


class SampledCoupling:
    """User-supplied k(tau) on a grid, interpolated with a monotone cubic (PCHIP)."""

    def __init__(self, tau: Sequence[float], k: Sequence[float]):
        tau = np.asarray(tau, dtype=float)
        k = np.asarray(k, dtype=float)
        if tau.ndim != 1 or tau.shape != k.shape or tau.size < 2:
            raise DomainError("sampled coupling needs matching 1-d grids with at least two points")
        if np.any(np.diff(tau) <= 0):
            raise DomainError("sampled coupling grid must be strictly increasing in tau")
        self.tau = tau
        self.k = k
        self._interp = PchipInterpolator(tau, k, extrapolate=False)

    def __call__(self, tau: ArrayLike) -> ArrayLike:
        return self._interp(tau)

    def __eq__(self, other):
        return (isinstance(other, SampledCoupling) and np.array_equal(self.tau, other.tau)
                and np.array_equal(self.k, other.k))

    def __hash__(self):
        return hash((self.tau.tobytes(), self.k.tobytes()))

    def __repr__(self):
        return f"SampledCoupling(n={self.tau.size}, tau=[{self.tau[0]}, {self.tau[-1]}])"

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.k)))

    def check_covers(self, tau_end: float):
        if self.tau[0] > 0 or self.tau[-1] < tau_end:
            raise DomainError(
                f"sampled coupling covers [{self.tau[0]}, {self.tau[-1]}], need [0, {tau_end}]")


CouplingSpec = Union[ConstantCoupling, ModulatedCoupling, SampledCoupling]


@dataclass(frozen=True)
class FreqModSpec:
    """Mechanical frequency modulation ``D2(tau) = d2 cos(omega_d2 tau + phi_d2)``."""

    d2: float = 0.0
    omega_d2: float = 2.0
    phi_d2: float = 0.0

    def __post_init__(self):
        if abs(self.d2) >= 0.5:
            raise DomainError(f"|d2| = {abs(self.d2)} is outside the supported range |d2| < 0.5")
        if abs(self.d2) >= 0.1:
            warnings.warn(f"|d2| = {abs(self.d2)} >= 0.1: perturbative results lose accuracy",
                          stacklevel=3)

    def __call__(self, tau: ArrayLike) -> ArrayLike:
        return self.d2 * np.cos(self.omega_d2 * tau + self.phi_d2)

    @property
    def is_zero(self) -> bool:
        return self.d2 == 0.0


NO_MODULATION = FreqModSpec()


@dataclass(frozen=True)
class BogoliubovPair:
    """Bogoliubov coefficients and the mechanical solutions they come from."""

    alpha: ArrayLike
    beta: ArrayLike
    p11: ArrayLike
    p11_dot: ArrayLike
    ip22: ArrayLike
    ip22_dot: ArrayLike

    @classmethod
    def from_solutions(cls, p, pd, q, qd) -> "BogoliubovPair":
        alpha = 0.5 * (p + qd + 1j * (pd - q))
        beta = 0.5 * (p - qd + 1j * (pd + q))
        return cls(alpha, beta, p, pd, q, qd)

    @property
    def xi(self) -> ArrayLike:
        return xi(self)

    @property
    def normalization(self) -> ArrayLike:
        """``|alpha|^2 - |beta|^2``, equal to one for a valid pair."""
        return np.abs(self.alpha) ** 2 - np.abs(self.beta) ** 2


@dataclass(frozen=True)
class FCoefficients:
    """The six F coefficients.  ``f_na`` and ``f_na2`` may be ``None`` when a
    closed form does not provide them."""

    f_na: Optional[ArrayLike]
    f_na2: Optional[ArrayLike]
    f_bp: ArrayLike
    f_bm: ArrayLike
    f_nabp: ArrayLike
    f_nabm: ArrayLike


@dataclass(frozen=True)
class JCoefficients:
    j_b: ArrayLike
    j_plus: ArrayLike
    j_minus: ArrayLike


@dataclass(frozen=True)
class Evolution:
    """F coefficients and Bogoliubov pair from one integration pass."""

    tau: ArrayLike
    f: FCoefficients
    bogoliubov: BogoliubovPair


def xi(bp: BogoliubovPair) -> ArrayLike:
    """``xi = alpha + conj(beta)``."""
    return bp.alpha + np.conj(bp.beta)


def _as_grid(tau):
    scalar = np.ndim(tau) == 0
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    if t.ndim != 1:
        raise DomainError("tau must be a scalar or a 1-d array")
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("tau must be finite and non-negative")
    return t, scalar


def _integrate(drive, coupling, fm, tau, rtol, atol, with_f=True):
    """Integrate the augmented system and return the state at each tau.

    State: P11, P11', IP22, IP22', then (if ``with_f``) the inner integrals
    int k Re(xi) and int D1 Re(xi), followed by F_Na, F_Na2, F_B-, F_NaB-.
    F_B+ and F_NaB+ coincide with the inner integrals up to sign.
    """
    t, scalar = _as_grid(tau)
    t_end = float(t.max()) if t.size else 0.0
    if isinstance(coupling, SampledCoupling):
        coupling.check_covers(t_end)

    n = 10 if with_f else 4
    y0 = np.zeros(n)
    y0[0] = 1.0
    y0[3] = 1.0

    if with_f:
        def rhs(s, y):
            p, pd, q, qd, ck, cd = y[:6]
            w = 1.0 + 4.0 * fm(s)
            kk = coupling(s)
            dd = drive(s)
            # Re xi = p, Im xi = -q
            return np.array([pd, -w * p, qd, -w * q,
                             kk * p, dd * p,
                             2.0 * dd * q * ck + 2.0 * kk * q * cd,
                             -2.0 * kk * q * ck,
                             dd * q,
                             -kk * q])
    else:
        def rhs(s, y):
            w = 1.0 + 4.0 * fm(s)
            return np.array([y[1], -w * y[0], y[3], -w * y[2]])

    order = np.argsort(t, kind="stable")
    ts = t[order]
    out = np.empty((n, t.size))
    if t_end == 0.0:
        out[:] = y0[:, None]
    else:
        sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", t_eval=ts,
                        rtol=rtol, atol=atol)
        if sol.status != 0:
            raise NumericError(f"integration failed: {sol.message}", achieved=rtol)
        out[:, order] = sol.y
    if scalar:
        out = out[:, 0]
    return out


def _pair_from_state(y) -> BogoliubovPair:
    return BogoliubovPair.from_solutions(y[0], y[1], y[2], y[3])


def _f_from_state(y) -> FCoefficients:
    return FCoefficients(f_na=y[6], f_na2=y[7], f_bp=y[5], f_bm=y[8], f_nabp=-y[4], f_nabm=y[9])


def solve_mechanics(fm: FreqModSpec, tau: ArrayLike, rtol: float = RTOL,
                    atol: float = ATOL) -> BogoliubovPair:
    """Integrate the mechanical equations and assemble the Bogoliubov pair."""
    y = _integrate(None, None, fm, tau, rtol, atol, with_f=False)
    bp = _pair_from_state(y)
    err = np.max(np.abs(bp.normalization - 1.0))
    if err > 1e-8:
        raise NumericError(f"symplectic normalization violated by {err:.3e}", achieved=err)
    return bp


def evolve(drive: DriveSpec, coupling: CouplingSpec, fm: FreqModSpec = NO_MODULATION,
           tau: ArrayLike = 0.0, rtol: float = RTOL, atol: float = ATOL) -> Evolution:
    """F coefficients and Bogoliubov pair at ``tau`` (scalar or sorted-or-not array)."""
    y = _integrate(drive, coupling, fm, tau, rtol, atol)
    return Evolution(tau=tau, f=_f_from_state(y), bogoliubov=_pair_from_state(y))


def f_coefficients_numeric(drive: DriveSpec, coupling: CouplingSpec,
                           fm: FreqModSpec = NO_MODULATION, tau: ArrayLike = 0.0,
                           rtol: float = RTOL, atol: float = ATOL) -> FCoefficients:
    """All six F coefficients by direct integration."""
    return evolve(drive, coupling, fm, tau, rtol, atol).f


def mathieu_perturbative(d2: float, phi_d2: float, tau: ArrayLike):
    """Two-timescale solutions (P11, IP22) of the Mathieu equation with ``omega_d2 = 2``.

    Accurate to leading order in ``d2`` for ``d2 * tau`` of order one.
    """
    den = 2.0 * (d2 * math.cos(phi_d2) - 1.0)
    if den == 0.0:
        raise DomainError("singular denominator: d2 cos(phi_d2) = 1")
    tau = np.asarray(tau, dtype=float)
    if abs(d2) > 0 and np.any(abs(d2) * tau > 1.0 + 1e-12):
        warnings.warn("d2 * tau > 1: outside the range of the two-timescale solution",
                      stacklevel=2)
    e = np.exp(2.0 * d2 * tau)
    pre = np.exp(-d2 * tau)
    p11 = pre * ((e - 1.0) * (np.sin(tau + phi_d2) - d2 * np.sin(tau))
                 + d2 * (e + 1.0) * np.cos(tau + phi_d2) - (e + 1.0) * np.cos(tau)) / den
    ip22 = pre * ((e - 1.0) * np.cos(tau + phi_d2) - (e + 1.0) * np.sin(tau)) / den
    return p11, ip22


def _icos(w, phi, tau):
    """Integral of cos(w s + phi) over [0, tau], finite at w = 0."""
    return np.cos(0.5 * w * tau + phi) * tau * np.sinc(w * tau / (2.0 * np.pi))


def _isin(w, phi, tau):
    """Integral of sin(w s + phi) over [0, tau], finite at w = 0."""
    return np.sin(0.5 * w * tau + phi) * tau * np.sinc(w * tau / (2.0 * np.pi))


def f_coefficients_constant_resonant(k0: float, drive: DriveSpec, tau: ArrayLike,
                                     include_f_na: bool = True) -> FCoefficients:
    """Closed forms for constant coupling, resonant drive and no frequency modulation.

    ``f_na2 = -k0**2 (tau - sin(tau) cos(tau))``.  ``f_na`` has no printed closed
    form and is taken from the numeric pipeline (``None`` if not requested).
    """
    if abs(drive.omega_d1 - 1.0) > 1e-12:
        raise DomainError("constant-resonant closed form requires omega_d1 = 1")
    t = np.asarray(tau, dtype=float)
    d1, a, eps, p = drive.d1, drive.a, drive.epsilon, drive.phi_d1
    f_bp = -0.5 * d1 * (t * eps * np.cos(p) + (2 * a + eps * np.cos(t + p)) * np.sin(t))
    f_bm = 0.25 * d1 * (4 * a * (np.cos(t) - 1)
                        + eps * (2 * t * np.sin(p) + np.cos(2 * t + p) - np.cos(p)))
    f_nabp = -k0 * np.sin(t)
    f_nabm = k0 * (np.cos(t) - 1)
    f_na2 = -k0**2 * (t - np.sin(t) * np.cos(t))
    f_na = None
    if include_f_na:
        f_na = f_coefficients_numeric(drive, ConstantCoupling(k0), NO_MODULATION, tau).f_na
    return FCoefficients(f_na, f_na2, f_bp, f_bm, f_nabp, f_nabm)


def _modulated_pair(amp, omega, phi, t):
    """Return (int f cos, int f sin) over [0, t] for f = amp cos(omega s + phi)."""
    if abs(omega - 1.0) < RESONANCE_SWITCH or abs(omega + 1.0) < RESONANCE_SWITCH:
        ic = 0.5 * amp * (_icos(omega - 1.0, phi, t) + _icos(omega + 1.0, phi, t))
        is_ = 0.5 * amp * (_isin(omega + 1.0, phi, t) - _isin(omega - 1.0, phi, t))
        return ic, is_
    den = omega**2 - 1.0
    ic = amp * ((omega + 1) * np.sin((omega - 1) * t + phi) + (omega - 1) * np.sin((omega + 1) * t + phi)
                - 2 * omega * np.sin(phi)) / (2 * den)
    is_ = -amp * (np.cos(phi) - np.cos(t) * np.cos(omega * t + phi)
                  - omega * np.sin(t) * np.sin(omega * t + phi)) / den
    return ic, is_


def f_coefficients_modulated(k0: float, omega_k: float, phi_k: float, drive: DriveSpec,
                             tau: ArrayLike) -> FCoefficients:
    """Closed forms for ``k = k0 cos(omega_k tau + phi_k)`` and no frequency modulation.

    Returns F_B+, F_B-, F_NaB+ and F_NaB-; ``f_na`` and ``f_na2`` are ``None``.
    Near ``omega = 1`` the expressions are evaluated in a rearranged form that
    is free of the removable ``(omega**2 - 1)**-1`` singularity.
    """
    if omega_k < 0 or drive.omega_d1 < 0:
        raise DomainError("frequencies must be non-negative")
    t = np.asarray(tau, dtype=float)
    # with xi = exp(-i tau): Re xi = cos, Im xi = -sin
    kc, ks = _modulated_pair(k0, omega_k, phi_k, t)
    dc, ds = _modulated_pair(drive.d1 * drive.epsilon, drive.omega_d1, drive.phi_d1, t)
    d1a = drive.d1 * drive.a
    f_bp = -d1a * np.sin(t) - dc
    f_bm = d1a * (np.cos(t) - 1.0) - ds
    return FCoefficients(None, None, f_bp, f_bm, -kc, -ks)


def j_coefficients(bp: BogoliubovPair) -> JCoefficients:
    """J coefficients from the Bogoliubov pair (principal branch for ``j_b``)."""
    alpha = np.asarray(bp.alpha)
    beta = np.asarray(bp.beta)
    norm = np.abs(alpha) ** 2 - np.abs(beta) ** 2
    if np.any(np.abs(norm - 1.0) > 1e-8):
        raise DomainError("Bogoliubov pair is not normalized")
    # remove the integrator's share of the error so the clamp only sees roundoff
    scale = 1.0 / np.sqrt(norm)
    alpha, beta = alpha * scale, beta * scale
    u = alpha**2 - beta**2
    m = np.abs(u)
    arg_plus = _clamp_arcosh_arg(m)
    arg_minus = _clamp_arcosh_arg((2.0 * np.abs(alpha) ** 2 - 1.0) / m)
    return JCoefficients(
        j_b=-0.5 * np.angle(u / m),
        j_plus=0.25 * np.arccosh(arg_plus),
        j_minus=0.25 * np.arccosh(arg_minus),
    )


def _clamp_arcosh_arg(x, tol: float = 1e-12):
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0 - tol):
        raise DomainError(f"arcosh argument {np.min(x)} below 1")
    return np.maximum(x, 1.0)
