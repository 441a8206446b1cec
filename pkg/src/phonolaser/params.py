"""Device and drive parameter handling.

All frequencies, rates, detunings and shifts are angular (rad/s)
internally. Raw specifications are converted once, here, into the
derived quantities every other module consumes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .constants import HBAR, SPEED_OF_LIGHT, TWO_PI
from .errors import ValidationError


class Direction(str, enum.Enum):
    """Side from which the pump enters the coupled-resonator pair."""

    LEFT = "left"
    RIGHT = "right"


def _require_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be a finite positive number, got {value!r}")


def _require_finite(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value)):
        raise ValidationError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class RawDeviceSpec:
    """Static description of the two resonators and the mechanical mode.

    Exactly one of ``resonance`` (rad/s) or ``wavelength`` (m) may be
    omitted; the other is derived via lambda = 2*pi*c/omega_c. If both
    are given they must agree to 1e-9 relative.

    Fields
    ------
    refractive_index : n of the spinning resonator (dimensionless, > 1)
    radius_com       : radius of the optomechanical resonator (m)
    radius_spin      : radius of the spinning resonator (m)
    quality_com, quality_spin : optical quality factors (dimensionless)
    effective_mass   : mechanical effective mass (kg)
    mech_freq        : mechanical frequency (rad/s)
    mech_damping     : mechanical damping rate (rad/s, >= 0)
    optical_coupling : inter-resonator coupling J (rad/s, >= 0)
    dispersion_coeff : (lambda/n)(dn/dlambda), dimensionless, default 0
    """

    refractive_index: float
    radius_com: float
    radius_spin: float
    quality_com: float
    quality_spin: float
    effective_mass: float
    mech_freq: float
    mech_damping: float
    optical_coupling: float
    resonance: float | None = None
    wavelength: float | None = None
    dispersion_coeff: float = 0.0

    def __post_init__(self):
        _require_finite("refractive_index", self.refractive_index)
        if self.refractive_index <= 1.0:
            raise ValidationError(
                f"refractive_index must exceed 1, got {self.refractive_index!r}")
        _require_positive("radius_com", self.radius_com)
        _require_positive("radius_spin", self.radius_spin)
        _require_positive("quality_com", self.quality_com)
        _require_positive("quality_spin", self.quality_spin)
        _require_positive("effective_mass", self.effective_mass)
        _require_positive("mech_freq", self.mech_freq)
        _require_finite("mech_damping", self.mech_damping)
        if self.mech_damping < 0:
            raise ValidationError(
                f"mech_damping must be >= 0, got {self.mech_damping!r}")
        _require_finite("optical_coupling", self.optical_coupling)
        if self.optical_coupling < 0:
            raise ValidationError(
                f"optical_coupling must be >= 0, got {self.optical_coupling!r}")
        _require_finite("dispersion_coeff", self.dispersion_coeff)
        if self.resonance is None and self.wavelength is None:
            raise ValidationError("one of resonance or wavelength is required")
        if self.resonance is not None:
            _require_positive("resonance", self.resonance)
        if self.wavelength is not None:
            _require_positive("wavelength", self.wavelength)
        if self.resonance is not None and self.wavelength is not None:
            implied = TWO_PI * SPEED_OF_LIGHT / self.resonance
            if abs(implied - self.wavelength) > 1e-9 * self.wavelength:
                raise ValidationError(
                    "resonance and wavelength disagree: "
                    f"2*pi*c/omega_c = {implied!r} vs wavelength = {self.wavelength!r}")


@dataclass(frozen=True)
class DeviceParams:
    """RawDeviceSpec plus the derived rates.

    gamma_1 = omega_c / Q1, gamma_2 = omega_c / Q2, gamma = (gamma_1 + gamma_2)/2,
    zeta = omega_c / r1, x_zpf = sqrt(hbar / 2 m omega_m), g_om = zeta * x_zpf.
    """

    refractive_index: float
    radius_com: float
    radius_spin: float
    quality_com: float
    quality_spin: float
    effective_mass: float
    mech_freq: float
    mech_damping: float
    optical_coupling: float
    resonance: float
    wavelength: float
    dispersion_coeff: float
    gamma_1: float
    gamma_2: float
    gamma: float
    zeta: float
    x_zpf: float
    g_om: float

    @property
    def raw(self) -> RawDeviceSpec:
        return RawDeviceSpec(
            refractive_index=self.refractive_index,
            radius_com=self.radius_com,
            radius_spin=self.radius_spin,
            quality_com=self.quality_com,
            quality_spin=self.quality_spin,
            effective_mass=self.effective_mass,
            mech_freq=self.mech_freq,
            mech_damping=self.mech_damping,
            optical_coupling=self.optical_coupling,
            resonance=self.resonance,
            wavelength=self.wavelength,
            dispersion_coeff=self.dispersion_coeff,
        )


def derive_device(raw: RawDeviceSpec) -> DeviceParams:
    """Fill in the derived rates. Deterministic and idempotent."""
    omega_c = raw.resonance
    wavelength = raw.wavelength
    if omega_c is None:
        omega_c = TWO_PI * SPEED_OF_LIGHT / wavelength
    if wavelength is None:
        wavelength = TWO_PI * SPEED_OF_LIGHT / omega_c
    return DeviceParams(
        refractive_index=raw.refractive_index,
        radius_com=raw.radius_com,
        radius_spin=raw.radius_spin,
        quality_com=raw.quality_com,
        quality_spin=raw.quality_spin,
        effective_mass=raw.effective_mass,
        mech_freq=raw.mech_freq,
        mech_damping=raw.mech_damping,
        optical_coupling=raw.optical_coupling,
        resonance=omega_c,
        wavelength=wavelength,
        dispersion_coeff=raw.dispersion_coeff,
        gamma_1=omega_c / raw.quality_com,
        gamma_2=omega_c / raw.quality_spin,
        gamma=(omega_c / raw.quality_com + omega_c / raw.quality_spin) / 2.0,
        zeta=omega_c / raw.radius_com,
        x_zpf=math.sqrt(HBAR / (2.0 * raw.effective_mass * raw.mech_freq)),
        g_om=(omega_c / raw.radius_com)
        * math.sqrt(HBAR / (2.0 * raw.effective_mass * raw.mech_freq)),
    )


def with_coupling(params: DeviceParams, optical_coupling: float) -> DeviceParams:
    """Copy of ``params`` with a different inter-resonator coupling J."""
    return derive_device(replace(params.raw, optical_coupling=optical_coupling))


def sagnac_slope(params: DeviceParams) -> float:
    """d(Delta_sag)/d(Omega) for a left-side drive (rad/s per rad/s of spin).

    The Fresnel-Fizeau drag factor including the Lorentz dispersion
    correction:

        slope = n r2 omega_c / c * (1 - 1/n^2 - (lambda/n)(dn/dlambda))
    """
    n = params.refractive_index
    return (n * params.radius_spin * params.resonance / SPEED_OF_LIGHT
            * (1.0 - 1.0 / n**2 - params.dispersion_coeff))


def sagnac_shift(omega_spin: float, direction: Direction, params: DeviceParams) -> float:
    """Sagnac-Fizeau shift of the spinning resonator mode addressed by the drive.

    Sign convention (Fig. 1 of the source device): CCW spin (Omega > 0)
    with a left-side drive gives Delta_sag > 0; driving from the right
    flips the sign. Delta_sag is identically zero for Omega = 0.
    """
    _require_finite("omega_spin", omega_spin)
    sign = 1.0 if Direction(direction) is Direction.LEFT else -1.0
    return sign * omega_spin * sagnac_slope(params)


def spin_for_shift(delta_sag: float, direction: Direction, params: DeviceParams) -> float:
    """Spin speed that produces a given Sagnac shift for this drive direction."""
    _require_finite("delta_sag", delta_sag)
    sign = 1.0 if Direction(direction) is Direction.LEFT else -1.0
    return sign * delta_sag / sagnac_slope(params)


def drive_amplitude(pump_power: float, detuning: float, params: DeviceParams) -> float:
    """Real non-negative pump amplitude eps_L = sqrt(2 gamma_1 P_in / hbar omega_L).

    omega_L = omega_c + Delta_L. The drive phase convention keeps eps_L
    real; only |eps_L|^2 enters any observable.
    """
    _require_finite("pump_power", pump_power)
    if pump_power < 0:
        raise ValidationError(f"pump_power must be >= 0, got {pump_power!r}")
    _require_finite("detuning", detuning)
    omega_l = params.resonance + detuning
    if omega_l <= 0:
        raise ValidationError(
            f"laser frequency omega_c + detuning must be positive, got {omega_l!r}")
    return math.sqrt(2.0 * params.gamma_1 * pump_power / (HBAR * omega_l))


def rwa_margin(params: DeviceParams) -> float:
    """Diagnostic ratio |2J - omega_m| / min(omega_m, 2J + omega_m).

    Small values mean the rotating-wave treatment of the supermode
    picture is trustworthy; values near 1 flag it as invalid.
    """
    detune = abs(2.0 * params.optical_coupling - params.mech_freq)
    return detune / min(params.mech_freq, 2.0 * params.optical_coupling + params.mech_freq)


@dataclass(frozen=True)
class DriveContext:
    """Pump and rotation state for one operating point.

    ``sagnac_shift`` and ``omega_spin`` are kept consistent with the
    drive direction; all downstream physics depends on the rotation
    only through ``sagnac_shift``.
    """

    pump_power: float
    detuning: float
    direction: Direction
    omega_spin: float
    sagnac_shift: float
    amplitude: float


def make_drive(params: DeviceParams,
               pump_power: float,
               detuning: float,
               direction: Direction = Direction.LEFT,
               omega_spin: float = 0.0,
               sagnac: float | None = None) -> DriveContext:
    """Build a DriveContext from either a spin speed or a Sagnac shift.

    Pass ``omega_spin`` (rad/s, signed, positive = CCW) to evaluate the
    shift from the device geometry, or ``sagnac`` (rad/s) to pin the
    shift directly and back out the spin speed that produces it.
    """
    direction = Direction(direction)
    if sagnac is not None:
        shift = float(sagnac)
        _require_finite("sagnac", shift)
        spin = spin_for_shift(shift, direction, params)
    else:
        spin = float(omega_spin)
        shift = sagnac_shift(spin, direction, params)
    return DriveContext(
        pump_power=float(pump_power),
        detuning=float(detuning),
        direction=direction,
        omega_spin=spin,
        sagnac_shift=shift,
        amplitude=drive_amplitude(pump_power, detuning, params),
    )


def mirrored_drive(params: DeviceParams, drive: DriveContext) -> DriveContext:
    """Same pump, opposite spin: flips the sign of the Sagnac shift."""
    return make_drive(params, drive.pump_power, drive.detuning, drive.direction,
                      omega_spin=-drive.omega_spin)
