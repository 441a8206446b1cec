"""Unit-annotated JSON configuration.

Every numeric field is written as {"value": x, "unit": "..."} with an
explicit unit token. The loader rejects unknown fields and unknown
units rather than guessing; this is the line of defence against the
rad/s-vs-Hz ambiguities that plague this parameter set.

Frequency-like units:
    "rad/s"    value used as-is
    "Hz_x2pi"  value is a cyclic frequency, multiplied by 2*pi
    "omega_m"  value is a multiple of the mechanical frequency
Spin field additionally accepts:
    "sagnac_ratio"  value is Delta_sag / omega_m (spin speed derived)
Lengths: "m", "mm", "um", "nm".  Mass: "kg", "ng".  Power: "W", "uW".
Dimensionless: "1".
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .constants import TWO_PI
from .errors import ValidationError
from .params import (DeviceParams, Direction, DriveContext, RawDeviceSpec,
                     derive_device, make_drive)
from .steady import SolverSettings

_LENGTH = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}
_MASS = {"kg": 1.0, "ng": 1e-12}
_POWER = {"W": 1.0, "uW": 1e-6}

_DEVICE_FIELDS = {
    "refractive_index": "dimensionless",
    "radius_com": "length",
    "radius_spin": "length",
    "quality_com": "dimensionless",
    "quality_spin": "dimensionless",
    "effective_mass": "mass",
    "mech_freq": "frequency_no_omega_m",
    "mech_damping": "frequency",
    "resonance": "frequency",
    "wavelength": "length",
    "optical_coupling": "frequency",
    "dispersion_coeff": "dimensionless",
}


def _entry(section, name, raw):
    if not isinstance(raw, dict) or set(raw) != {"value", "unit"}:
        raise ValidationError(
            f"{section}.{name} must be an object {{'value': ..., 'unit': ...}}")
    value = raw["value"]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{section}.{name}.value must be a number, got {value!r}")
    return float(value), raw["unit"]


def _scaled(section, name, raw, table):
    value, unit = _entry(section, name, raw)
    if unit not in table:
        raise ValidationError(
            f"{section}.{name}: unknown unit {unit!r}, expected one of {sorted(table)}")
    return value * table[unit]


def _frequency(section, name, raw, omega_m=None):
    value, unit = _entry(section, name, raw)
    if unit == "rad/s":
        return value
    if unit == "Hz_x2pi":
        return value * TWO_PI
    if unit == "omega_m":
        if omega_m is None:
            raise ValidationError(
                f"{section}.{name}: unit 'omega_m' is not allowed for this field")
        return value * omega_m
    raise ValidationError(
        f"{section}.{name}: unknown unit {unit!r}, expected 'rad/s', 'Hz_x2pi'"
        + ("" if omega_m is None else ", 'omega_m'"))


def parse_device(section: dict) -> DeviceParams:
    unknown = set(section) - set(_DEVICE_FIELDS)
    if unknown:
        raise ValidationError(f"device: unknown fields {sorted(unknown)}")
    if "mech_freq" not in section:
        raise ValidationError("device.mech_freq is required")
    omega_m = _frequency("device", "mech_freq", section["mech_freq"])
    kwargs = {"mech_freq": omega_m}
    for name, kind in _DEVICE_FIELDS.items():
        if name == "mech_freq":
            continue
        if name not in section:
            if name in ("resonance", "wavelength", "dispersion_coeff"):
                continue
            raise ValidationError(f"device.{name} is required")
        raw = section[name]
        if kind == "dimensionless":
            value, unit = _entry("device", name, raw)
            if unit != "1":
                raise ValidationError(f"device.{name}: unknown unit {unit!r}, expected '1'")
            kwargs[name] = value
        elif kind == "length":
            kwargs[name] = _scaled("device", name, raw, _LENGTH)
        elif kind == "mass":
            kwargs[name] = _scaled("device", name, raw, _MASS)
        else:
            kwargs[name] = _frequency("device", name, raw, omega_m=omega_m)
    return derive_device(RawDeviceSpec(**kwargs))


def parse_drive(section: dict, device: DeviceParams) -> DriveContext:
    allowed = {"pump_power", "detuning", "direction", "spin"}
    unknown = set(section) - allowed
    if unknown:
        raise ValidationError(f"drive: unknown fields {sorted(unknown)}")
    power = _scaled("drive", "pump_power", section.get(
        "pump_power", {"value": 0.0, "unit": "W"}), _POWER)
    detuning = _frequency("drive", "detuning", section.get(
        "detuning", {"value": 0.0, "unit": "rad/s"}), omega_m=device.mech_freq)
    direction_raw = section.get("direction", "left")
    try:
        direction = Direction(direction_raw)
    except ValueError:
        raise ValidationError(
            f"drive.direction must be 'left' or 'right', got {direction_raw!r}") from None
    spin_raw = section.get("spin", {"value": 0.0, "unit": "rad/s"})
    value, unit = _entry("drive", "spin", spin_raw)
    if unit == "sagnac_ratio":
        return make_drive(device, power, detuning, direction,
                          sagnac=value * device.mech_freq)
    if unit in ("rad/s", "Hz_x2pi"):
        omega_spin = value * (TWO_PI if unit == "Hz_x2pi" else 1.0)
        return make_drive(device, power, detuning, direction, omega_spin=omega_spin)
    raise ValidationError(
        f"drive.spin: unknown unit {unit!r}, expected 'rad/s', 'Hz_x2pi', 'sagnac_ratio'")


def parse_solver(section: dict) -> SolverSettings:
    allowed = {"tolerance", "max_iterations", "relaxation"}
    unknown = set(section) - allowed
    if unknown:
        raise ValidationError(f"solver: unknown fields {sorted(unknown)}")
    return SolverSettings(
        tolerance=section.get("tolerance", 1e-12),
        max_iterations=section.get("max_iterations", 10_000),
        relaxation=section.get("relaxation", 0.5),
    )


@dataclass(frozen=True)
class ResolvedConfig:
    device: DeviceParams
    drive: DriveContext
    solver: SolverSettings
    source: dict


def parse_config(data: dict) -> ResolvedConfig:
    if not isinstance(data, dict):
        raise ValidationError("config root must be a JSON object")
    unknown = set(data) - {"device", "drive", "solver"}
    if unknown:
        raise ValidationError(f"config: unknown sections {sorted(unknown)}")
    if "device" not in data:
        raise ValidationError("config.device section is required")
    device = parse_device(data["device"])
    drive = parse_drive(data.get("drive", {}), device)
    solver = parse_solver(data.get("solver", {}))
    return ResolvedConfig(device=device, drive=drive, solver=solver, source=data)


def load_config(path) -> ResolvedConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(json.load(fh))


def paper_config() -> ResolvedConfig:
    """The bundled device calibrated to the source paper's numerics."""
    from importlib.resources import files

    text = files("phonolaser.data").joinpath("paper_device.json").read_text()
    return parse_config(json.loads(text))
