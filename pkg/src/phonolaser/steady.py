"""Self-consistent steady state of the coupled-mode equations.

The optical amplitudes follow the closed forms

    a1 = eps_L / [gamma_1 - i(Delta_L + zeta x_s) + J^2 / (gamma_2 - i(Delta_L + Delta_sag))]
    a2 = -i J a1 / (gamma_2 - i(Delta_L + Delta_sag))
    b  = zeta x_zpf |a1|^2 / (omega_m - i gamma_m)

with the displacement x_s = x_zpf (b + b*) solved self-consistently
against the radiation-pressure balance

    m (omega_m^2 + gamma_m^2) x_s = hbar zeta |a1|^2.

The solver is a damped fixed-point iteration on x_s seeded at 0, so the
branch it returns is the one continuously connected to the undriven
state. A seed scan afterwards guards against silently picking one
branch of a bistable response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .errors import DomainError, MultistableRegimeError, SolverError, ValidationError
from .params import DeviceParams, DriveContext

_X_FLOOR = 1e-30  # m, absolute scale below which displacements count as zero


@dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-12
    max_iterations: int = 10_000
    relaxation: float = 0.5

    def __post_init__(self):
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise ValidationError(f"tolerance must be > 0, got {self.tolerance!r}")
        if self.max_iterations < 1:
            raise ValidationError(
                f"max_iterations must be >= 1, got {self.max_iterations!r}")
        if not (0 < self.relaxation <= 1):
            raise ValidationError(
                f"relaxation must be in (0, 1], got {self.relaxation!r}")


@dataclass(frozen=True)
class SteadyState:
    a1: complex
    a2: complex
    b: complex
    x_s: float
    photon_number_1: float
    iterations: int
    residual_norm: float


def closed_form(params: DeviceParams, drive: DriveContext, x_s: float):
    """Amplitudes at a prescribed displacement (no self-consistency)."""
    det2 = params.gamma_2 - 1j * (drive.detuning + drive.sagnac_shift)
    a1 = drive.amplitude / (params.gamma_1
                            - 1j * (drive.detuning + params.zeta * x_s)
                            + params.optical_coupling**2 / det2)
    a2 = -1j * params.optical_coupling * a1 / det2
    b = (params.zeta * params.x_zpf * abs(a1) ** 2
         / (params.mech_freq - 1j * params.mech_damping))
    return a1, a2, b


def balance_displacement(params: DeviceParams, a1: complex) -> float:
    """Displacement at which spring and radiation forces balance."""
    return (HBAR * params.zeta * abs(a1) ** 2
            / (params.effective_mass * (params.mech_freq**2 + params.mech_damping**2)))


def _rhs_norm(params: DeviceParams, drive: DriveContext, a1, a2, b) -> float:
    """Max-norm of the three equation-of-motion right-hand sides."""
    zx = params.zeta * params.x_zpf
    f1 = ((1j * drive.detuning - params.gamma_1) * a1
          + 1j * zx * (b + b.conjugate()) * a1
          - 1j * params.optical_coupling * a2 + drive.amplitude)
    f2 = ((1j * (drive.detuning + drive.sagnac_shift) - params.gamma_2) * a2
          - 1j * params.optical_coupling * a1)
    f3 = (-(1j * params.mech_freq + params.mech_damping) * b
          + 1j * zx * abs(a1) ** 2)
    return max(abs(f1), abs(f2), abs(f3))


def _iterate(params, drive, settings, x_seed):
    """Damped fixed-point iteration on x_s. Returns (x_s, iterations)."""
    x = float(x_seed)
    r = settings.relaxation
    for it in range(1, settings.max_iterations + 1):
        a1, _, _ = closed_form(params, drive, x)
        target = balance_displacement(params, a1)
        step = target - x
        if abs(step) <= settings.tolerance * max(abs(x), abs(target), _X_FLOOR):
            return target, it
        x += r * step
    raise SolverError(
        f"steady state did not converge in {settings.max_iterations} iterations "
        f"(last displacement update {step:.3e} m)",
        residual=abs(step), iterations=settings.max_iterations)


def solve_steady(params: DeviceParams, drive: DriveContext,
                 settings: SolverSettings | None = None) -> SteadyState:
    """Self-consistent steady state on the branch connected to zero drive.

    Raises
    ------
    SolverError
        Fixed point not reached within ``max_iterations``, or the
        converged amplitudes fail the equation-of-motion residual check.
    MultistableRegimeError
        A scan over 16 displacement seeds spanning [0, 100 x_s] found
        more than one attractor. The physics in that regime is bistable
        and a single branch answer would be misleading.
    """
    settings = settings or SolverSettings()
    x_main, iterations = _iterate(params, drive, settings, 0.0)

    if x_main > _X_FLOOR:
        # geometric seed ladder plus the zero seed; all must land on one attractor
        seeds = np.concatenate(
            ([0.0], np.geomspace(1e-3 * x_main, 100.0 * x_main, 15)))
        fixed = [_iterate(params, drive, settings, s)[0] for s in seeds]
        spread = max(fixed) - min(fixed)
        if spread > 100.0 * settings.tolerance * max(x_main, _X_FLOOR):
            raise MultistableRegimeError(
                "steady state is multistable for this drive: seed scan found "
                f"attractors spanning [{min(fixed):.6e}, {max(fixed):.6e}] m",
                fixed_points=sorted(set(float(f) for f in fixed)))

    a1, a2, b = closed_form(params, drive, x_main)
    norm = _rhs_norm(params, drive, a1, a2, b)
    scale = drive.amplitude if drive.amplitude > 0 else 1.0
    residual = norm / scale
    if residual > settings.tolerance:
        raise SolverError(
            f"converged displacement leaves equation residual {residual:.3e} "
            f"above tolerance {settings.tolerance:.3e}",
            residual=residual, iterations=iterations)
    return SteadyState(a1=a1, a2=a2, b=b, x_s=x_main,
                       photon_number_1=abs(a1) ** 2,
                       iterations=iterations, residual_norm=residual)


def force_balance_residual(state: SteadyState, params: DeviceParams) -> float:
    """Relative mismatch of m(omega_m^2 + gamma_m^2) x_s against hbar zeta |a1|^2.

    Zero by convention when both sides vanish (undriven state).
    """
    spring = (params.effective_mass
              * (params.mech_freq**2 + params.mech_damping**2) * state.x_s)
    radiation = HBAR * params.zeta * state.photon_number_1
    if radiation == 0.0:
        return 0.0 if spring == 0.0 else math.inf
    return abs(spring - radiation) / radiation


def displacement_ratio(params: DeviceParams,
                       drive_left: DriveContext,
                       drive_right: DriveContext,
                       drive_stationary: DriveContext,
                       settings: SolverSettings | None = None):
    """Displacement amplification pair (eta_gt, eta_lt).

    eta_gt = x_s(Delta_sag > 0) / x_s(Omega = 0) and eta_lt likewise for
    Delta_sag < 0. The three contexts must share pump power and detuning
    and differ only in rotation state.
    """
    for name, d in (("drive_left", drive_left), ("drive_right", drive_right)):
        if (d.pump_power != drive_stationary.pump_power
                or d.detuning != drive_stationary.detuning):
            raise ValidationError(
                f"{name} must differ from drive_stationary only in spin state")
    if drive_stationary.sagnac_shift != 0.0:
        raise ValidationError("drive_stationary must have zero Sagnac shift")
    if drive_left.sagnac_shift < 0 or drive_right.sagnac_shift > 0:
        raise ValidationError(
            "expected sagnac_shift > 0 for drive_left and < 0 for drive_right")
    x_ref = solve_steady(params, drive_stationary, settings).x_s
    if x_ref <= _X_FLOOR:
        raise DomainError("reference displacement x_s(Omega=0) is zero; "
                          "eta is undefined without drive")
    x_pos = solve_steady(params, drive_left, settings).x_s
    x_neg = solve_steady(params, drive_right, settings).x_s
    return x_pos / x_ref, x_neg / x_ref
