"""Simulator and analysis library for a nonreciprocal phonon laser:
a stationary optomechanical resonator evanescently coupled to a
spinning optical resonator, where the rotation-induced Sagnac shift
makes mechanical gain, lasing threshold and phonon emission depend on
the drive direction.
"""

__version__ = "0.1.0"

from .config import ResolvedConfig, load_config, paper_config, parse_config
from .dynamics import (GrowthEstimate, ThresholdBracket, Trajectory,
                       dynamic_threshold, estimate_growth_rate, growth_rate_at,
                       integrate)
from .errors import (BracketError, DivergenceError, DomainError,
                     EstimationError, IntegrationError, MultistableRegimeError,
                     SolverError, ValidationError)
from .gain import (AuditResult, GainBreakdown, OperatingPoint, ThresholdResult,
                   approximation_audit, gain_at_power, isolation,
                   mechanical_gain, phonon_number, population_inversion,
                   supermode_frequencies, threshold_power)
from .params import (DeviceParams, Direction, DriveContext, RawDeviceSpec,
                     derive_device, drive_amplitude, make_drive, mirrored_drive,
                     rwa_margin, sagnac_shift, sagnac_slope, spin_for_shift,
                     with_coupling)
from .steady import (SolverSettings, SteadyState, displacement_ratio,
                     force_balance_residual, solve_steady)
from .sweep import SweepAxis, SweepResult, SweepSpec, figure_preset, run_sweep

__all__ = [
    "__version__",
    "ResolvedConfig", "load_config", "paper_config", "parse_config",
    "GrowthEstimate", "ThresholdBracket", "Trajectory", "dynamic_threshold",
    "estimate_growth_rate", "growth_rate_at", "integrate",
    "BracketError", "DivergenceError", "DomainError", "EstimationError",
    "IntegrationError", "MultistableRegimeError", "SolverError", "ValidationError",
    "AuditResult", "GainBreakdown", "OperatingPoint", "ThresholdResult",
    "approximation_audit", "gain_at_power", "isolation", "mechanical_gain",
    "phonon_number", "population_inversion", "supermode_frequencies",
    "threshold_power",
    "DeviceParams", "Direction", "DriveContext", "RawDeviceSpec",
    "derive_device", "drive_amplitude", "make_drive", "mirrored_drive",
    "rwa_margin", "sagnac_shift", "sagnac_slope", "spin_for_shift",
    "with_coupling",
    "SolverSettings", "SteadyState", "displacement_ratio",
    "force_balance_residual", "solve_steady",
    "SweepAxis", "SweepResult", "SweepSpec", "figure_preset", "run_sweep",
]
