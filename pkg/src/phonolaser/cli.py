"""Command-line interface.

Exit codes: 0 success, 1 validation/precondition error, 2 solver or
integration failure. Diagnostics go to stderr; data goes to --out (or
stdout).
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

from .config import load_config, paper_config
from .dynamics import dynamic_threshold, growth_rate_at, integrate
from .errors import (BracketError, DomainError, EstimationError,
                     IntegrationError, SolverError, ValidationError)
from .gain import OperatingPoint, isolation, mechanical_gain, threshold_power
from .params import make_drive
from .steady import SolverSettings, force_balance_residual, solve_steady
from .sweep import SweepSpec, figure_preset, run_sweep


def _add_global_flags(parser, suppress=False):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--config", default=default(None),
                        help="device/drive JSON (default: bundled paper-calibrated device)")
    parser.add_argument("--out", default=default(None),
                        help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=default("csv"))
    parser.add_argument("--jobs", type=int, default=default(1),
                        help="sweep worker threads")
    parser.add_argument("--tolerance", type=float, default=default(None),
                        help="steady-state solver tolerance")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phonolaser",
        description="Nonreciprocal phonon-laser steady states, gain spectra, "
                    "thresholds, isolation and time-domain cross-checks.")
    _add_global_flags(parser)

    # global flags are also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)

    sub = parser.add_subparsers(dest="command", required=True)

    def drive_flags(p, power=True):
        p.add_argument("--delta-L", type=float, dest="delta_l",
                       help="pump detuning in units of omega_m")
        if power:
            p.add_argument("--pump-power", type=float, help="pump power in W")
        p.add_argument("--spin", type=float, help="spin speed Omega in rad/s")
        p.add_argument("--sagnac-ratio", type=float,
                       help="Delta_sag / omega_m (alternative to --spin)")
        p.add_argument("--direction", choices=("left", "right"))

    p = sub.add_parser("steady", parents=[common], help="self-consistent steady state")
    drive_flags(p)

    p = sub.add_parser("gain", parents=[common], help="supermode gain breakdown")
    drive_flags(p)
    p.add_argument("--inversion", choices=("exact", "approx"), default="exact")

    p = sub.add_parser("threshold", parents=[common], help="lasing threshold power")
    drive_flags(p, power=False)

    p = sub.add_parser("isolation", parents=[common], help="isolation ratio R in dB")
    drive_flags(p)

    p = sub.add_parser("dynamics", parents=[common], help="integrate the mode equations; emits CSV")
    drive_flags(p)
    p.add_argument("--horizon", type=float, default=None, help="integration span in s")
    p.add_argument("--kick", type=float, default=1e-3,
                   help="mechanical seed amplitude")
    p.add_argument("--cold-start", action="store_true",
                   help="start from (0, 0, kick) instead of the perturbed steady state")
    p.add_argument("--rtol", type=float, default=1e-9)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--rate", action="store_true",
                   help="report the fitted growth rate instead of the trajectory")

    p = sub.add_parser("sweep", parents=[common], help="run a sweep specification")
    p.add_argument("--spec", required=True, help="sweep spec JSON file")

    p = sub.add_parser("figure", parents=[common], help="run a bundled figure preset")
    p.add_argument("preset", choices=("fig2a", "fig2b", "fig3", "fig4a", "fig4b"))

    return parser


@contextmanager
def _output(args):
    if args.out:
        fh = open(args.out, "w", newline="")
        try:
            yield fh
        finally:
            fh.close()
    else:
        yield sys.stdout


def _emit_record(args, record: dict):
    with _output(args) as fh:
        if args.format == "json":
            json.dump(record, fh, sort_keys=True)
            fh.write("\n")
        else:
            fh.write("quantity,value\n")
            for key, value in record.items():
                fh.write(f"{key},{value}\n")


def _resolve(args):
    cfg = load_config(args.config) if args.config else paper_config()
    drive = cfg.drive
    power = getattr(args, "pump_power", None)
    power = drive.pump_power if power is None else power
    detuning = (drive.detuning if args.delta_l is None
                else args.delta_l * cfg.device.mech_freq)
    direction = drive.direction if args.direction is None else args.direction
    if args.sagnac_ratio is not None and args.spin is not None:
        raise ValidationError("give only one of --spin / --sagnac-ratio")
    if args.sagnac_ratio is not None:
        drive = make_drive(cfg.device, power, detuning, direction,
                           sagnac=args.sagnac_ratio * cfg.device.mech_freq)
    elif args.spin is not None:
        drive = make_drive(cfg.device, power, detuning, direction,
                           omega_spin=args.spin)
    else:
        drive = make_drive(cfg.device, power, detuning, direction,
                           omega_spin=drive.omega_spin)
    settings = cfg.solver
    if args.tolerance is not None:
        settings = SolverSettings(tolerance=args.tolerance,
                                  max_iterations=settings.max_iterations,
                                  relaxation=settings.relaxation)
    return cfg.device, drive, settings


def _resolve_spec_units(data: dict, device) -> dict:
    """Allow axis entries carrying "unit": "omega_m" in spec files."""
    out = dict(data)
    axes = []
    for axis in data.get("axes", []):
        axis = dict(axis)
        unit = axis.pop("unit", "rad/s")
        if unit == "omega_m":
            axis["lo"] = axis["lo"] * device.mech_freq
            axis["hi"] = axis["hi"] * device.mech_freq
        elif unit != "rad/s":
            raise ValidationError(f"axis unit must be 'rad/s' or 'omega_m', got {unit!r}")
        axes.append(axis)
    out["axes"] = axes
    return out


def _cmd_steady(args):
    device, drive, settings = _resolve(args)
    state = solve_steady(device, drive, settings)
    _emit_record(args, {
        "re_a1[1]": state.a1.real, "im_a1[1]": state.a1.imag,
        "re_a2[1]": state.a2.real, "im_a2[1]": state.a2.imag,
        "re_b[1]": state.b.real, "im_b[1]": state.b.imag,
        "x_s[m]": state.x_s,
        "photon_number_1[1]": state.photon_number_1,
        "iterations[1]": state.iterations,
        "residual_norm[1]": state.residual_norm,
        "force_balance_residual[1]": force_balance_residual(state, device),
    })


def _cmd_gain(args):
    device, drive, settings = _resolve(args)
    point = OperatingPoint.from_steady(device, drive, settings)
    br = mechanical_gain(point, inversion=args.inversion)
    _emit_record(args, {
        "omega_plus[rad/s]": br.omega_plus, "omega_minus[rad/s]": br.omega_minus,
        "beta0[rad^2/s^2]": br.beta0, "beta[rad^2/s^2]": br.beta,
        "dn_exact[1]": br.dn_exact, "dn_approx[1]": br.dn_approx,
        "G0[rad/s]": br.gain_g0, "G_sag[rad/s]": br.gain_sagnac,
        "G[rad/s]": br.gain, "G_over_gamma_m[1]": br.gain / device.mech_damping,
        "omega_prime[rad/s]": br.omega_prime,
        "re_drive_term[rad/s]": br.drive_term.real,
        "im_drive_term[rad/s]": br.drive_term.imag,
        "gamma_eff[rad/s]": br.gamma_eff,
        "N_b[1]": br.n_stimulated,
        "inversion_used": br.inversion_used,
    })


def _cmd_threshold(args):
    device, drive, settings = _resolve(args)
    result = threshold_power(device, drive)
    _emit_record(args, {
        "P_th[W]": result.power,
        "gain_at_threshold[rad/s]": result.gain_at_threshold,
        "gain_over_gamma_m[1]": result.gain_at_threshold / device.mech_damping,
        "consistent[bool]": result.consistent,
    })


def _cmd_isolation(args):
    device, drive, settings = _resolve(args)
    if drive.omega_spin == 0.0:
        raise ValidationError("isolation needs a nonzero --spin or --sagnac-ratio")
    value = isolation(device, drive, omega_spin=abs(drive.omega_spin),
                      settings=settings)
    _emit_record(args, {
        "R[dB]": value,
        "omega_spin[rad/s]": abs(drive.omega_spin),
        "delta_sag[rad/s]": abs(drive.sagnac_shift),
    })


def _cmd_dynamics(args):
    device, drive, settings = _resolve(args)
    horizon = args.horizon if args.horizon is not None else 10.0 / device.mech_damping
    if args.rate:
        est = growth_rate_at(device, drive, settings, kick=args.kick,
                             horizon=horizon, rtol=args.rtol, atol=args.atol)
        _emit_record(args, {
            "rate[1/s]": est.rate,
            "rate_over_gamma_m[1]": est.rate / device.mech_damping,
            "window_start[s]": est.window[0], "window_end[s]": est.window[1],
            "fit_residual[1]": est.fit_residual,
            "saturated[bool]": est.saturated,
        })
        return
    if args.cold_start:
        initial = (0.0j, 0.0j, complex(args.kick))
    else:
        state = solve_steady(device, drive, settings)
        initial = (state.a1, state.a2, state.b + args.kick)
    traj = integrate(device, drive, initial=initial, horizon=horizon,
                     rtol=args.rtol, atol=args.atol)
    with _output(args) as fh:
        traj.to_csv(fh)


def _cmd_sweep(args):
    with open(args.spec, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    cfg = load_config(args.config) if args.config else paper_config()
    spec = SweepSpec.from_dict(_resolve_spec_units(data, cfg.device))
    settings = cfg.solver
    if args.tolerance is not None:
        settings = SolverSettings(tolerance=args.tolerance,
                                  max_iterations=settings.max_iterations,
                                  relaxation=settings.relaxation)
    result = run_sweep(spec, cfg.device, cfg.drive, settings, jobs=args.jobs)
    with _output(args) as fh:
        (result.to_json if args.format == "json" else result.to_csv)(fh)


def _cmd_figure(args):
    cfg = load_config(args.config) if args.config else paper_config()
    spec = figure_preset(args.preset, cfg.device)
    settings = cfg.solver
    if args.tolerance is not None:
        settings = SolverSettings(tolerance=args.tolerance,
                                  max_iterations=settings.max_iterations,
                                  relaxation=settings.relaxation)
    result = run_sweep(spec, cfg.device, cfg.drive, settings, jobs=args.jobs)
    with _output(args) as fh:
        (result.to_json if args.format == "json" else result.to_csv)(fh)


_COMMANDS = {
    "steady": _cmd_steady,
    "gain": _cmd_gain,
    "threshold": _cmd_threshold,
    "isolation": _cmd_isolation,
    "dynamics": _cmd_dynamics,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        _COMMANDS[args.command](args)
    except (ValidationError, DomainError, BracketError, EstimationError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
