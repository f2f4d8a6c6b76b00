"""Command-line front end.

Subcommands
-----------
eval          one quantity at one time, JSON on stdout
sweep         one quantity over a tau grid, CSV
separability  |K|^2 for a config, or the table of fractional frequencies
sensitivity   QFI and the dimensionful bounds for a config
reproduce     regenerate the tables and the data behind the figures

Exit codes: 0 ok, 1 reproduction tolerance failure, 2 config error,
3 numeric error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .cfi import (HomodyneSetting, cfi_heterodyne_coherent, cfi_heterodyne_squeezed,
                  cfi_homodyne_coherent, cfi_homodyne_squeezed, is_kerr_trivial,
                  optimal_lo_phase, rotate_amplitude)
from .dynamics import (ConstantCoupling, CouplingSpec, DriveSpec, FreqModSpec,
                       ModulatedCoupling, NO_MODULATION, SampledCoupling, evolve)
from .params import (DomainError, GravitySignal, INFINITE_TEMPERATURE, NumericError,
                     SensorConfig, d1_from_signal, squeeze_from_db, thermal_parameter,
                     zero_point_fluctuation)
from .qfi import (CavityState, CoherentState, PhotonStats, SqueezedCoherentState,
                  generator_from_unit, optimal_squeeze_phase, photon_stats, qfi_global,
                  qfi_phase_map)
from .sensitivity import (DEFAULT_SAFETY_FACTOR, MechanicalState, Scheme, SensitivityReport,
                          delta_g0_fractional, delta_g0_resonant, displacement_stats,
                          gw_strain_bound, min_source_mass, phonon_number, photon_bounds,
                          qcrb_delta_g0)
from .separability import (FractionalFrequency, fractional_frequencies, is_separable,
                           k_na_squared, verify_decoupling)

EXIT_OK = 0
EXIT_REPRO = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

QUANTITIES = ("qfi_global", "qfi_local", "cfi_homodyne", "cfi_heterodyne", "k_na_squared",
              "mean_x", "std_x", "phonon_number")
TARGETS = ("table1", "table2", "fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5", "fig6")


class ConfigError(Exception):
    """Malformed or invalid configuration; the message names the field."""


class OutputError(Exception):
    pass


# --------------------------------------------------------------------------- config


@dataclass
class Scenario:
    """Everything needed to evaluate the library quantities for one setup."""

    sensor: SensorConfig
    drive: DriveSpec
    coupling: CouplingSpec
    fm: FreqModSpec
    cavity: CavityState
    r_T: float
    M: float = 1.0
    lo_phase: Optional[float] = None
    validity_length: Optional[float] = None
    scheme: Optional[str] = None
    safety_factor: float = DEFAULT_SAFETY_FACTOR
    detector_length: Optional[float] = None
    config_hash: str = ""

    @property
    def x0(self) -> float:
        return zero_point_fluctuation(self.sensor)

    @property
    def stats(self) -> PhotonStats:
        return photon_stats(self.cavity)


def config_hash(raw: Dict[str, Any]) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _get(section: Dict[str, Any], key: str, where: str, default=..., kind=float):
    if key not in section:
        if default is ...:
            raise ConfigError(f"{where}.{key}: required field missing")
        return default
    val = section[key]
    try:
        if kind is float:
            if isinstance(val, bool):
                raise TypeError
            return float(val)
        return kind(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {val!r}") from None


def _complex(val, where):
    if isinstance(val, (int, float)) and not isinstance(val, bool):
        return complex(val)
    if isinstance(val, (list, tuple)) and len(val) == 2:
        try:
            return complex(float(val[0]), float(val[1]))
        except (TypeError, ValueError):
            pass
    if isinstance(val, dict) and {"re", "im"} >= set(val):
        return complex(float(val.get("re", 0.0)), float(val.get("im", 0.0)))
    raise ConfigError(f"{where}: expected a number, [re, im] or {{re, im}}, got {val!r}")


def _section(raw, name, required=False):
    sec = raw.get(name, None)
    if sec is None:
        if required:
            raise ConfigError(f"{name}: required section missing")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected an object")
    return sec


def parse_config(raw: Dict[str, Any]) -> Scenario:
    """Validate a JSON configuration and build a :class:`Scenario`.

    Frequencies are angular (rad/s), converted to units of ``omega_m``.
    """
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")
    known = {"system", "signal", "coupling", "freq_mod", "cavity_state", "thermal",
             "measurement"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"top level: unknown section(s) {sorted(extra)}")
    try:
        return _parse(raw)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def _parse(raw):
    sy = _section(raw, "system", required=True)
    omega_m = _get(sy, "omega_m", "system")
    sensor = SensorConfig(
        omega_m=omega_m,
        mass=_get(sy, "mass", "system"),
        omega_c=_get(sy, "omega_c", "system", None),
        cavity_length=_get(sy, "cavity_length", "system", None),
        k0=_get(sy, "k0", "system", None),
    )

    sg = _section(raw, "signal")
    sig = GravitySignal(
        g0=_get(sg, "g0", "signal", 0.0),
        a=_get(sg, "a", "signal", 0.0),
        epsilon=_get(sg, "epsilon", "signal", 1.0),
        omega_g=_get(sg, "omega_g", "signal", omega_m),
        phi_g=_get(sg, "phi_g", "signal", 0.0),
    )
    drive = d1_from_signal(sig, sensor)

    cp = _section(raw, "coupling")
    ctype = cp.get("type", "constant")
    if "k0" in cp:
        k0 = _get(cp, "k0", "coupling")
    else:
        try:
            k0 = sensor.coupling()
        except DomainError:
            raise ConfigError("coupling.k0: not given and not derivable from system") from None
    if ctype == "constant":
        coupling = ConstantCoupling(k0)
    elif ctype == "modulated":
        coupling = ModulatedCoupling(k0, _get(cp, "omega_k", "coupling") / omega_m,
                                     _get(cp, "phi_k", "coupling", 0.0))
    elif ctype == "sampled":
        if "t" not in cp or "k" not in cp:
            raise ConfigError("coupling: sampled coupling needs arrays 't' (s) and 'k'")
        try:
            coupling = SampledCoupling(np.asarray(cp["t"], float) * omega_m, cp["k"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"coupling: {exc}") from None
    else:
        raise ConfigError(f"coupling.type: unknown value {ctype!r}")

    fs = _section(raw, "freq_mod")
    fm = FreqModSpec(
        d2=_get(fs, "d2", "freq_mod", 0.0),
        omega_d2=_get(fs, "omega_d2", "freq_mod", 2.0 * omega_m) / omega_m,
        phi_d2=_get(fs, "phi_d2", "freq_mod", 0.0),
    )

    cs = _section(raw, "cavity_state", required=True)
    if "mu" not in cs:
        raise ConfigError("cavity_state.mu: required field missing")
    mu = _complex(cs["mu"], "cavity_state.mu")
    stype = cs.get("type", "coherent")
    if stype == "coherent":
        cavity = CoherentState(mu)
    elif stype == "squeezed":
        if "r" in cs:
            r = _get(cs, "r", "cavity_state")
        elif "S_dB" in cs:
            r = squeeze_from_db(_get(cs, "S_dB", "cavity_state"))
        else:
            raise ConfigError("cavity_state: squeezed state needs 'r' or 'S_dB'")
        vp = cs.get("varphi", "optimal")
        varphi = optimal_squeeze_phase(mu) if vp == "optimal" else _get(cs, "varphi", "cavity_state")
        cavity = SqueezedCoherentState(mu, r, varphi)
    else:
        raise ConfigError(f"cavity_state.type: unknown value {stype!r}")

    th = _section(raw, "thermal")
    T = th.get("T_kelvin", 0.0)
    if T != INFINITE_TEMPERATURE:
        T = _get(th, "T_kelvin", "thermal", 0.0)
    r_T = thermal_parameter(T, omega_m)

    ms = _section(raw, "measurement")
    lo = ms.get("lo_phase", "optimal")
    lo_phase = None if lo == "optimal" else _get(ms, "lo_phase", "measurement")
    scheme = ms.get("scheme")
    if scheme is not None:
        try:
            Scheme(scheme)
        except ValueError:
            raise ConfigError(f"measurement.scheme: unknown value {scheme!r}") from None
    M = _get(ms, "M", "measurement", 1.0)
    if M < 1:
        raise ConfigError("measurement.M: must be at least 1")
    return Scenario(
        sensor=sensor, drive=drive, coupling=coupling, fm=fm, cavity=cavity, r_T=r_T,
        M=M, lo_phase=lo_phase,
        validity_length=_get(ms, "validity_length", "measurement", None),
        scheme=scheme,
        safety_factor=_get(ms, "safety_factor", "measurement", DEFAULT_SAFETY_FACTOR),
        detector_length=_get(ms, "detector_length", "measurement", None),
        config_hash=config_hash(raw),
    )


def load_config(path) -> Scenario:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: line {exc.lineno}: {exc.msg}") from None
    return parse_config(raw)


# ----------------------------------------------------------------------- evaluation


def _infer_scheme(sc: Scenario) -> str:
    if sc.scheme:
        return sc.scheme
    if not sc.fm.is_zero:
        return Scheme.PARAMETRIC.value
    if isinstance(sc.coupling, ModulatedCoupling):
        if abs(sc.coupling.omega_k - 1.0) < 1e-9:
            return Scheme.RESONANT_COUPLING.value
        return Scheme.FRACTIONAL.value
    return Scheme.CONSTANT.value


def validity_flags(sc: Scenario, tau: float) -> Dict[str, Any]:
    """Photon-number ceilings for the displacement restriction, if a length is set."""
    ps = sc.stats
    out: Dict[str, Any] = {"scheme": _infer_scheme(sc), "safety_factor": sc.safety_factor,
                           "mean_n": ps.mean_n, "std_n": ps.std_n}
    k0 = sc.coupling.scale
    if sc.validity_length is None or k0 <= 0:
        out.update(max_mean_n=None, max_std_n=None, photon_bounds_ok=None)
        return out
    scheme = out["scheme"]
    t = tau
    if scheme == Scheme.RESONANT_COUPLING.value and not t > 0:
        t = 2 * math.pi
    pb = photon_bounds(scheme, sc.validity_length, sc.x0, k0, tau=t, d2=sc.fm.d2)
    out.update(max_mean_n=pb.max_mean_n, max_std_n=pb.max_std_n,
               photon_bounds_ok=bool(pb.check(ps, sc.safety_factor)))
    return out


def evaluate(sc: Scenario, quantity: str, tau) -> Dict[str, Any]:
    """Evaluate ``quantity`` on a scalar or array of ``tau``.

    Returns a dict with ``value`` and quantity-specific flags; for cavity-only
    quantities at non-separable times the value is NaN and ``qfi_global`` is
    reported as an upper bound.
    """
    if quantity not in QUANTITIES:
        raise ConfigError(f"--quantity: unknown value {quantity!r}; choose from {QUANTITIES}")
    ps = sc.stats
    t = np.asarray(tau, dtype=float)
    if quantity in ("mean_x", "std_x"):
        d = displacement_stats(sc.drive, sc.coupling, sc.fm, MechanicalState(sc.r_T), ps,
                               sc.x0, t)
        return {"value": d.mean_x if quantity == "mean_x" else d.std_x}
    if quantity == "phonon_number":
        return {"value": phonon_number(sc.drive, sc.coupling, sc.fm, ps, t)}

    unit = evolve(sc.drive.unit(), sc.coupling, sc.fm, t).f
    if quantity == "k_na_squared":
        return {"value": k_na_squared(unit)}
    gc = generator_from_unit(unit)
    if quantity == "qfi_global":
        return {"value": qfi_global(gc, ps, sc.r_T)}

    sep = np.asarray(is_separable(unit, sc.coupling.scale))
    upper = qfi_global(gc, ps, sc.r_T)
    if quantity == "qfi_local":
        val = np.where(sep, 4.0 * unit.f_na**2 * ps.var_n, np.nan)
        return {"value": val, "separable": sep, "qfi_global_upper_bound": upper}

    # CFI needs the actual rotation angle F_Na (at the true d1) and F_Na2
    f_true = evolve(sc.drive, sc.coupling, sc.fm, t).f
    mu = complex(sc.cavity.mu)
    varphi = getattr(sc.cavity, "varphi", 0.0)
    r = getattr(sc.cavity, "r", 0.0)
    b = gc.b

    def one(i):
        f_na = float(np.atleast_1d(f_true.f_na)[i])
        bi = float(np.atleast_1d(b)[i])
        ra = rotate_amplitude(mu, varphi, f_na)
        if quantity == "cfi_homodyne":
            if isinstance(sc.cavity, SqueezedCoherentState):
                return cfi_homodyne_squeezed(bi, ra, r, optimal=True)
            lam = optimal_lo_phase(ra) if sc.lo_phase is None else sc.lo_phase
            return cfi_homodyne_coherent(bi, ra, HomodyneSetting(lam))
        if isinstance(sc.cavity, SqueezedCoherentState):
            return cfi_heterodyne_squeezed(bi, ra, r)
        return cfi_heterodyne_coherent(bi, mu)

    n = np.atleast_1d(t).size
    vals = np.array([one(i) if np.atleast_1d(sep)[i] else np.nan for i in range(n)])
    kerr = np.array([is_kerr_trivial(float(x)) for x in np.atleast_1d(f_true.f_na2)])
    if not np.all(kerr):
        print("warning: F_Na2 is not a multiple of 2 pi at some times; the CFI formulas assume "
              "it is", file=sys.stderr)
    if np.ndim(t) == 0:
        vals, kerr = vals[0], bool(kerr[0])
    return {"value": vals, "separable": sep, "kerr_trivial": kerr,
            "qfi_global_upper_bound": upper}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist()) if x.ndim else _jsonable(x.item())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return None if math.isnan(x) else (str(x) if math.isinf(x) else x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _fmt(x) -> str:
    return format(float(x), ".16e")


def write_csv(path, header: Sequence[str], columns: Sequence[Sequence[float]], meta: Dict[str, str]):
    lines = [f"# {k}={v}" for k, v in meta.items()]
    lines.append(",".join(header))
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


def write_json(path, obj):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


def parse_tau_range(text: str):
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise ConfigError(f"--tau-range: expected start:end:points, got {text!r}") from None
    if not (b > a >= 0) or n < 2:
        raise ConfigError("--tau-range: need end > start >= 0 and points >= 2")
    return np.linspace(a, b, n)


def parse_tau(text: str) -> float:
    """Accept plain numbers and multiples of pi such as ``20pi`` or ``2*pi``."""
    s = text.strip().lower().replace("*", "")
    try:
        if s.endswith("pi"):
            head = s[:-2]
            return (float(head) if head else 1.0) * math.pi
        return float(s)
    except ValueError:
        raise ConfigError(f"--tau: cannot parse {text!r}") from None


def _meta(sc_hash: str) -> Dict[str, str]:
    return {"version": __version__, "config_hash": sc_hash}


def thread_count() -> int:
    """Worker cap from ``OPTOMECH_THREADS`` (default 1)."""
    raw = os.environ.get("OPTOMECH_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, min(n, os.cpu_count() or 1))


def parallel_map(fn: Callable, items: Sequence) -> List:
    """Order-preserving map, in worker processes when ``OPTOMECH_THREADS > 1``."""
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------- reproduction


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    computed: Optional[float] = None
    expected: Optional[float] = None

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _rel(a, b):
    return abs(a - b) / abs(b)


def _scalar_check(name, computed, expected, rtol):
    rel = _rel(computed, expected)
    return Check(name, rel <= rtol, f"computed={computed:.4e} reference={expected:.2e} "
                 f"rel_dev={rel:.3f} tol={rtol}", computed, expected)


TABLE1 = dict(omega_m=2 * math.pi * 100, mass=1e-15, k0=0.1, n=10, s=20, mu=250.0, r=1.73, M=1)
TABLE2 = dict(omega_m=10.0, mass=1e-10, k0=1.0, s=20, mu=600.0, r=2.0, L=10.0, M=10)


def table1_state() -> PhotonStats:
    return photon_stats(SqueezedCoherentState(TABLE1["mu"], TABLE1["r"],
                                              optimal_squeeze_phase(TABLE1["mu"])))


def reproduce_table1(out: Path):
    p = TABLE1
    ps = table1_state()
    res = delta_g0_resonant(p["n"], p["k0"], 0.0, 1.0, ps, p["M"], p["mass"], p["omega_m"])
    frac = delta_g0_fractional(p["s"], p["k0"], ps, p["M"], p["mass"], p["omega_m"])
    # cross-check with the QFI of the numeric pipeline at the same times
    x0 = zero_point_fluctuation(SensorConfig(p["omega_m"], p["mass"]))
    ff = FractionalFrequency(-1, p["s"])
    unit_res = evolve(DriveSpec(1.0, 0.0, 1.0, 1.0, math.pi), ConstantCoupling(p["k0"]),
                      NO_MODULATION, 2 * math.pi * p["n"]).f
    unit_frac = evolve(DriveSpec(1.0, 0.0, 1.0, ff.omega_frac, 0.0),
                       ModulatedCoupling(p["k0"], ff.omega_frac, 0.0), NO_MODULATION,
                       ff.tau_sep).f
    qcrb_res = qcrb_delta_g0(4 * unit_res.f_na**2 * ps.var_n, p["M"], x0, p["omega_m"])
    qcrb_frac = qcrb_delta_g0(4 * unit_frac.f_na**2 * ps.var_n, p["M"], x0, p["omega_m"])
    m_s = min_source_mass(delta_g0_fractional(p["s"], p["k0"], ps, 1e4, p["mass"], p["omega_m"]),
                          100e-6, 0.1)
    checks = [
        _scalar_check("table1 resonant delta_g0", res, 7.2e-11, 0.05),
        _scalar_check("table1 fractional delta_g0", frac, 1.4e-11, 0.05),
        Check("table1 pipeline agrees with resonant formula", _rel(qcrb_res, res) < 1e-6,
              f"pipeline={qcrb_res:.6e} formula={res:.6e}"),
        Check("table1 pipeline agrees with fractional formula", _rel(qcrb_frac, frac) < 1e-6,
              f"pipeline={qcrb_frac:.6e} formula={frac:.6e}"),
        Check("table1 source mass", 1.8e-10 <= m_s <= 2.4e-10, f"m_S={m_s:.3e} kg"),
    ]
    write_json(out / "table1.json", {
        **_meta("table1"), "photon_mean": ps.mean_n, "photon_var": ps.var_n,
        "delta_g0_resonant": res, "delta_g0_fractional": frac,
        "delta_g0_resonant_pipeline": qcrb_res, "delta_g0_fractional_pipeline": qcrb_frac,
        "reference_resonant": 7.2e-11, "reference_fractional": 1.4e-11,
        "min_source_mass_M1e4": m_s})
    return checks


def reproduce_table2(out: Path):
    p = TABLE2
    ps = photon_stats(SqueezedCoherentState(p["mu"], p["r"], optimal_squeeze_phase(p["mu"])))
    dg = delta_g0_fractional(p["s"], p["k0"], ps, p["M"], p["mass"], p["omega_m"])
    dh = gw_strain_bound(dg, p["L"], p["omega_m"])
    dh_array = gw_strain_bound(
        delta_g0_fractional(p["s"], p["k0"], ps, 1e5, p["mass"], p["omega_m"]), 0.1, p["omega_m"])
    checks = [
        _scalar_check("table2 strain", dh, 1.3e-21, 0.05),
        Check("table2 detector array same order", 0.1 <= dh_array / dh <= 10,
              f"array={dh_array:.3e} single={dh:.3e}"),
    ]
    write_json(out / "table2.json", {**_meta("table2"), "delta_g0": dg, "delta_h": dh,
                                     "delta_h_array": dh_array, "reference_delta_h": 1.3e-21})
    return checks


def _zeros_at(tau, values, targets, tol):
    ok = True
    for t0 in targets:
        i = int(np.argmin(np.abs(tau - t0)))
        ok &= abs(tau[i] - t0) < 1e-9 and abs(values[i]) < tol
    return bool(ok)


def reproduce_fig2a(out: Path):
    cases = [(1, 1), (1, 2), (1, 3)]  # Omega_frac = 3, 2, 5/3
    tau = np.linspace(0, 6 * math.pi, 601)
    cols, checks = [], []
    for n1, s in cases:
        ff = FractionalFrequency(n1, s)
        f = evolve(DriveSpec(d1=0.0), ModulatedCoupling(1.0, ff.omega_frac, 0.0),
                   NO_MODULATION, tau).f
        k2 = k_na_squared(f)
        cols.append(k2)
        zeros = [q * ff.tau_sep for q in range(1, int(6 // s) + 1)]
        ok = _zeros_at(tau, k2, zeros, 1e-12)
        checks.append(Check(f"fig2a zeros Omega={ff.fraction}", ok,
                            f"|K|^2 at tau in {[round(z / math.pi) for z in zeros]} pi below 1e-12"))
    write_csv(out / "fig2a.csv", ["tau", "omega_3", "omega_2", "omega_5_3"], [tau, *cols],
              _meta("fig2a"))
    return checks


def reproduce_fig2b(out: Path):
    tau = np.linspace(0, 10 * math.pi, 1001)[1:]
    f = evolve(DriveSpec(d1=0.0), ConstantCoupling(1.0), FreqModSpec(0.01, 2.0, 0.0), tau).f
    k2 = k_na_squared(f)
    write_csv(out / "fig2b.csv", ["tau", "two_log_abs_k"], [tau, np.log(k2)], _meta("fig2b"))
    sep = is_separable(f, 1.0)
    return [Check("fig2b never separable", not bool(np.any(sep)),
                  f"min |K|^2 = {k2.min():.3e} on (0, 10pi]")]


def _fig3_curves(a, eps, tau):
    ps = photon_stats(SqueezedCoherentState(1.0, 1.0, 0.0))
    setups = {
        "resonant": (DriveSpec(1.0, a, eps, 1.0, math.pi), ConstantCoupling(1.0)),
        "doubly_resonant": (DriveSpec(1.0, a, eps, 1.0, math.pi / 2), ModulatedCoupling(1.0, 1.0, 0.0)),
        "fractional_s8": (DriveSpec(1.0, a, eps, 0.75, 0.0), ModulatedCoupling(1.0, 0.75, 0.0)),
    }
    curves = {}
    for name, (drive, coupling) in setups.items():
        gc = generator_from_unit(evolve(drive, coupling, NO_MODULATION, tau).f)
        curves[name] = qfi_global(gc, ps, math.inf)
    return curves


def reproduce_fig3a(out: Path):
    tau = np.linspace(0, 8 * math.pi, 801)
    c = _fig3_curves(0.0, 1.0, tau)
    write_csv(out / "fig3a.csv", ["tau", *c], [tau, *c.values()], _meta("fig3a"))
    late = tau >= 4 * math.pi
    i8 = -1
    return [
        Check("fig3a doubly resonant dominates resonant at late times",
              bool(np.all(c["doubly_resonant"][late] >= c["resonant"][late])),
              "I(Omega_d1,k=1) >= I(Omega_d1=1) for tau >= 4pi"),
        Check("fig3a ordering at tau=8pi",
              c["doubly_resonant"][i8] > c["fractional_s8"][i8] > c["resonant"][i8],
              f"doubly={c['doubly_resonant'][i8]:.4e} fractional={c['fractional_s8'][i8]:.4e} "
              f"resonant={c['resonant'][i8]:.4e}"),
    ]


def reproduce_fig3b(out: Path):
    tau = np.linspace(0, 20 * math.pi, 2001)
    c = _fig3_curves(1.0, 0.1, tau)
    write_csv(out / "fig3b.csv", ["tau", *c], [tau, *c.values()], _meta("fig3b"))
    i2 = int(np.argmin(np.abs(tau - 2 * math.pi)))
    return [Check("fig3b resonant ahead early, doubly resonant ahead late",
                  bool(c["resonant"][i2] > c["doubly_resonant"][i2]
                       and c["doubly_resonant"][-1] > c["resonant"][-1]),
                  f"tau=2pi: {c['resonant'][i2]:.3e} vs {c['doubly_resonant'][i2]:.3e}; "
                  f"tau=20pi: {c['resonant'][-1]:.3e} vs {c['doubly_resonant'][-1]:.3e}")]


FIG4 = dict(d2=0.02, tau=4 * math.pi, k0=1.0, epsilon=1.0, mu=1.0, points=101)


def _fig4_row(p2):
    return qfi_phase_map([p2], _fig4_grid(), FIG4["k0"], FIG4["d2"], FIG4["tau"],
                         PhotonStats(FIG4["mu"] ** 2, FIG4["mu"] ** 2), math.inf,
                         FIG4["epsilon"])[0]


def _fig4_grid():
    return np.linspace(-math.pi, math.pi, FIG4["points"], endpoint=False)


def fig4_map():
    grid = _fig4_grid()
    return grid, np.array(parallel_map(_fig4_row, list(grid)))


def fig4_argmax_check(grid, qmap) -> Check:
    """The map is pi-periodic in phi_d1 for a = 0, so phi_d1 is compared mod pi."""
    i, j = np.unravel_index(int(np.argmax(qmap)), qmap.shape)
    step = grid[1] - grid[0]
    d2_err = abs(grid[i] + math.pi / 2)
    d1_err = abs((grid[j] + math.pi / 2) % math.pi - math.pi / 2)
    ok = d2_err <= step + 1e-12 and d1_err <= step + 1e-12
    at_target = qmap[int(np.argmin(np.abs(grid + math.pi / 2))), int(np.argmin(np.abs(grid)))]
    return Check("fig4 argmax at (-pi/2, 0)", ok,
                 f"argmax=({grid[i]:.4f}, {grid[j]:.4f}) grid step={step:.4f}; "
                 f"max={qmap[i, j]:.6e}, value nearest (-pi/2, 0)={at_target:.6e}",
                 float(grid[i]), -math.pi / 2)


def reproduce_fig4(out: Path):
    grid, qmap = fig4_map()
    rows = np.repeat(grid, grid.size)
    cols = np.tile(grid, grid.size)
    write_csv(out / "fig4.csv", ["phi_d2", "phi_d1", "qfi"], [rows, cols, qmap.ravel()],
              _meta("fig4"))
    return [fig4_argmax_check(grid, qmap)]


def _fig56_setups(d2=0.02):
    frac = 0.8
    return {
        "undriven": (DriveSpec(d1=0.0), ConstantCoupling(1.0), NO_MODULATION),
        "constant_resonant": (DriveSpec(1.0, 1.0, 0.5, 1.0, math.pi), ConstantCoupling(1.0),
                              NO_MODULATION),
        "doubly_resonant": (DriveSpec(1.0, 1.0, 0.5, 1.0, math.pi / 2),
                            ModulatedCoupling(1.0, 1.0, 0.0), NO_MODULATION),
        "fractional_4_5": (DriveSpec(1.0, 1.0, 0.5, frac, 0.0), ModulatedCoupling(1.0, frac, 0.0),
                           NO_MODULATION),
        "parametric": (DriveSpec(1.0, 1.0, 0.5, 1.0, 0.0), ConstantCoupling(1.0),
                       FreqModSpec(d2, 2.0, -math.pi / 2)),
    }


def reproduce_fig5(out: Path):
    tau = np.linspace(0, 20 * math.pi, 2001)
    ps = photon_stats(CoherentState(10.0))
    header, cols, checks = ["tau"], [tau], []
    for name, (drive, coupling, fm) in _fig56_setups().items():
        d = displacement_stats(drive, coupling, fm, MechanicalState(0.0), ps, 1.0, tau)
        header += [f"{name}_mean", f"{name}_std"]
        cols += [d.mean_x, d.std_x]
        if name == "fractional_4_5":
            i = int(np.argmin(np.abs(tau - 10 * math.pi)))
            checks.append(Check("fig5 fractional variance envelope closes at 10pi",
                                abs(d.std_x[i] - 1.0) < 1e-8, f"std_x/x0 = {d.std_x[i]:.12f}"))
    write_csv(out / "fig5.csv", header, cols, _meta("fig5"))
    return checks


def reproduce_fig6(out: Path):
    tau = np.linspace(0, 20 * math.pi, 2001)
    ps = photon_stats(CoherentState(1.0))
    header, cols, checks = ["tau"], [tau], []
    for name, (drive, coupling, fm) in _fig56_setups().items():
        nb = phonon_number(drive, coupling, fm, ps, tau)
        header.append(name)
        cols.append(nb)
        if name == "undriven":
            ok = _zeros_at(tau, nb, [2 * math.pi * q for q in range(1, 11)], 1e-9)
            checks.append(Check("fig6 undriven phonon zeros at 2pi multiples", ok, ""))
        if name == "fractional_4_5":
            ok = _zeros_at(tau, nb, [10 * math.pi, 20 * math.pi], 1e-9)
            checks.append(Check("fig6 fractional phonon zeros at 10pi, 20pi", ok,
                                f"values {nb[1000]:.2e}, {nb[-1]:.2e}"))
    write_csv(out / "fig6.csv", header, cols, _meta("fig6"))
    return checks


REPRODUCERS = {
    "table1": reproduce_table1, "table2": reproduce_table2,
    "fig2a": reproduce_fig2a, "fig2b": reproduce_fig2b,
    "fig3a": reproduce_fig3a, "fig3b": reproduce_fig3b,
    "fig4": reproduce_fig4, "fig5": reproduce_fig5, "fig6": reproduce_fig6,
}


def reproduce(target: str, out_dir) -> List[Check]:
    out = Path(out_dir)
    targets = TARGETS if target == "all" else (target,)
    checks: List[Check] = []
    for t in targets:
        checks += REPRODUCERS[t](out)
    write_json(out / f"summary_{target}.json",
               {"version": __version__, "target": target,
                "checks": [asdict(c) for c in checks]})
    return checks


# -------------------------------------------------------------------------- commands


def _require_config(args):
    if not args.config:
        raise ConfigError("--config: required for this subcommand")
    sc = load_config(args.config)
    if getattr(args, "safety_factor", None) is not None:
        if not args.safety_factor > 0:
            raise ConfigError("--safety-factor: must be positive")
        sc.safety_factor = args.safety_factor
    return sc


def _tau_of(args):
    if args.tau is None:
        raise ConfigError("--tau: required")
    return parse_tau(args.tau)


def cmd_eval(args) -> int:
    sc = _require_config(args)
    tau = _tau_of(args)
    res = evaluate(sc, args.quantity, tau)
    rec = {"version": __version__, "config_hash": sc.config_hash, "quantity": args.quantity,
           "tau": tau, **res, "validity": validity_flags(sc, tau)}
    _emit(args, rec)
    return EXIT_OK


def _emit(args, rec):
    if args.out:
        write_json(args.out, rec)
    else:
        print(json.dumps(_jsonable(rec), sort_keys=True))


def cmd_sweep(args) -> int:
    sc = _require_config(args)
    if not args.tau_range:
        raise ConfigError("--tau-range: required for sweep")
    tau = parse_tau_range(args.tau_range)
    res = evaluate(sc, args.quantity, tau)
    header = ["tau", args.quantity]
    if args.out is None:
        raise ConfigError("--out: required for sweep")
    write_csv(args.out, header, [tau, np.asarray(res["value"], float)], _meta(sc.config_hash))
    return EXIT_OK


def cmd_separability(args) -> int:
    if args.config:
        sc = load_config(args.config)
        tau = parse_tau_range(args.tau_range) if args.tau_range else np.array([_tau_of(args)])
        f = evolve(DriveSpec(d1=0.0), sc.coupling, sc.fm, tau).f
        k2 = k_na_squared(f)
        if args.out:
            write_csv(args.out, ["tau", "k_na_squared"], [tau, k2], _meta(sc.config_hash))
        else:
            rec = {"version": __version__, "config_hash": sc.config_hash,
                   "tau": tau, "k_na_squared": k2,
                   "separable_by_criterion": is_separable(f, sc.coupling.scale)}
            print(json.dumps(_jsonable(rec), sort_keys=True))
        return EXIT_OK
    rows = []
    for ff in fractional_frequencies(args.s_max):
        rows.append({"n1": ff.n1, "s": ff.s, "omega_frac": str(ff.fraction),
                     "tau_sep_over_pi": ff.s,
                     "decouples_q1_3": all(verify_decoupling(ff, 1.0, q) for q in (1, 2, 3))})
    rec = {"version": __version__, "s_max": args.s_max, "fractional_frequencies": rows}
    _emit(args, rec)
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    sc = _require_config(args)
    tau = _tau_of(args)
    ps = sc.stats
    unit = evolve(sc.drive.unit(), sc.coupling, sc.fm, tau).f
    sep = bool(is_separable(unit, sc.coupling.scale))
    if sep:
        qfi, kind = float(4.0 * unit.f_na**2 * ps.var_n), "local"
    else:
        qfi, kind = float(qfi_global(generator_from_unit(unit), ps, sc.r_T)), "global_upper_bound"
    dg = qcrb_delta_g0(qfi, sc.M, sc.x0, sc.sensor.omega_m)
    validity = validity_flags(sc, tau)
    validity["separable"] = sep
    rep = SensitivityReport(dg, qfi, sc.M, validity["scheme"], validity)
    rec = {"version": __version__, "config_hash": sc.config_hash, "tau": tau,
           "qfi_kind": kind, **asdict(rep)}
    if sc.detector_length:
        rec["delta_h"] = gw_strain_bound(dg, sc.detector_length, sc.sensor.omega_m)
    _emit(args, rec)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    target = args.target or "all"
    if target not in TARGETS + ("all",):
        raise ConfigError(f"--target: unknown value {target!r}; choose from {TARGETS + ('all',)}")
    out = Path(args.out or "reproduction")
    t0 = time.perf_counter()
    checks = reproduce(target, out)
    for c in checks:
        print(c.line())
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed "
          f"in {time.perf_counter() - t0:.1f} s; output in {out}")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_REPRO


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="optograv", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, quantity=False):
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--tau", help="dimensionless time, e.g. 6.28 or 20pi")
        sp.add_argument("--tau-range", help="start:end:points")
        sp.add_argument("--out", help="output path")
        sp.add_argument("--safety-factor", type=float, help="margin for the photon bounds")
        if quantity:
            sp.add_argument("--quantity", default="qfi_global", choices=QUANTITIES)

    common(sub.add_parser("eval", help="evaluate one quantity at one time"), quantity=True)
    common(sub.add_parser("sweep", help="evaluate one quantity over a tau grid"), quantity=True)
    sp = sub.add_parser("separability", help="|K|^2 or the fractional frequency table")
    common(sp)
    sp.add_argument("--s-max", type=int, default=12)
    common(sub.add_parser("sensitivity", help="QFI and dimensionful bounds"))
    sp = sub.add_parser("reproduce", help="regenerate tables and figure data")
    sp.add_argument("--target", default="all", help=f"one of {', '.join(TARGETS)} or all")
    sp.add_argument("--out", help="output directory (default ./reproduction)")
    return p


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "separability": cmd_separability,
            "sensitivity": cmd_sensitivity, "reproduce": cmd_reproduce}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
