"""Optomechanical gravimetry: nonlinear cavity dynamics, Fisher information
and sensitivity bounds for time-dependent gravitational signals."""

__version__ = "0.1.0"

from .params import (DomainError, GravitySignal, NumericError, PreconditionError, SensorConfig,
                     d1_from_signal, thermal_parameter, zero_point_fluctuation)
from .dynamics import (ConstantCoupling, DriveSpec, FreqModSpec, ModulatedCoupling,
                       NO_MODULATION, SampledCoupling, evolve)
from .qfi import CoherentState, SqueezedCoherentState, photon_stats, qfi_global

__all__ = [
    "__version__", "DomainError", "NumericError", "PreconditionError", "SensorConfig",
    "GravitySignal", "d1_from_signal", "thermal_parameter", "zero_point_fluctuation",
    "DriveSpec", "ConstantCoupling", "ModulatedCoupling", "SampledCoupling", "FreqModSpec",
    "NO_MODULATION", "evolve", "CoherentState", "SqueezedCoherentState", "photon_stats",
    "qfi_global",
]
