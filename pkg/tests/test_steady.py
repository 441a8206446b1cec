import dataclasses
import math

import numpy as np
import pytest

import phonolaser as pl
from phonolaser.constants import HBAR
from phonolaser.steady import balance_displacement, closed_form


def _drive(device, power=10e-6, detuning_ratio=0.45, sag_ratio=0.0):
    return pl.make_drive(device, power, detuning_ratio * device.mech_freq,
                         sagnac=sag_ratio * device.mech_freq)


class TestSolveSteady:
    def test_undriven_fixed_point(self, device, solver):
        state = pl.solve_steady(device, _drive(device, power=0.0), solver)
        assert state.a1 == 0 and state.a2 == 0 and state.b == 0
        assert state.x_s == 0.0
        assert state.photon_number_1 == 0.0
        assert state.residual_norm == 0.0

    def test_decoupled_single_cavity_form(self, device, solver):
        dev = pl.with_coupling(device, 0.0)
        drive = _drive(dev, power=1e-6, detuning_ratio=0.45)
        state = pl.solve_steady(dev, drive, solver)
        expected = drive.amplitude / (dev.gamma_1
                                      - 1j * (drive.detuning + dev.zeta * state.x_s))
        assert state.a1 == pytest.approx(expected, rel=1e-12)
        assert state.a2 == 0

    def test_photon_number_field_is_square_modulus(self, device, solver):
        state = pl.solve_steady(device, _drive(device), solver)
        assert state.photon_number_1 == abs(state.a1) ** 2

    def test_displacement_matches_mech_amplitude(self, device, solver):
        state = pl.solve_steady(device, _drive(device), solver)
        assert state.x_s == pytest.approx(device.x_zpf * 2 * state.b.real, rel=1e-10)

    def test_residual_below_tolerance_across_operating_points(self, device, solver):
        wm = device.mech_freq
        for dlr in (-0.6, -0.1, 0.3, 0.45, 0.55):
            for sag in (-0.1, 0.0, 0.1):
                state = pl.solve_steady(device, _drive(device, 10e-6, dlr, sag), solver)
                assert state.residual_norm <= solver.tolerance

    def test_spinning_raises_red_detuned_photon_number(self, device, solver):
        # the Delta_sag > 0 resonance sits red of the stationary one
        for dlr in (-0.7, -0.65, -0.6, -0.55):
            spun = pl.solve_steady(device, _drive(device, 10e-6, dlr, 0.1), solver)
            still = pl.solve_steady(device, _drive(device, 10e-6, dlr, 0.0), solver)
            assert spun.photon_number_1 > still.photon_number_1

    def test_reciprocity_spin_reversal_equals_direction_swap(self, device, solver):
        wm = device.mech_freq
        a = pl.make_drive(device, 10e-6, 0.45 * wm, pl.Direction.LEFT, omega_spin=6000.0)
        b = pl.make_drive(device, 10e-6, 0.45 * wm, pl.Direction.RIGHT, omega_spin=-6000.0)
        assert a.sagnac_shift == b.sagnac_shift
        sa = pl.solve_steady(device, a, solver)
        sb = pl.solve_steady(device, b, solver)
        for field in dataclasses.fields(pl.SteadyState):
            assert getattr(sa, field.name) == getattr(sb, field.name)

    def test_continuity_in_power(self, device, solver):
        xs = [pl.solve_steady(device, _drive(device, p, 0.45, 0.1), solver).x_s
              for p in np.linspace(1e-6, 20e-6, 40)]
        rel_steps = np.abs(np.diff(xs)) / np.abs(xs[:-1])
        assert np.all(rel_steps < 0.6)
        assert np.all(np.diff(xs) > 0)

    def test_relaxation_independence(self, device):
        drive = _drive(device)
        fast = pl.solve_steady(device, drive, pl.SolverSettings(relaxation=0.5))
        slow = pl.solve_steady(device, drive, pl.SolverSettings(relaxation=0.25))
        assert slow.x_s == pytest.approx(fast.x_s, rel=1e-11)

    def test_small_coupling_limit_scales_quadratically(self, device, solver):
        drive_kwargs = dict(power=10e-6, detuning_ratio=0.45, sag_ratio=0.1)
        devs = [pl.derive_device(dataclasses.replace(
            device.raw, radius_com=device.radius_com * k)) for k in (4.0, 8.0, 16.0)]
        deviations = []
        for dev in devs:
            drive = _drive(dev, **drive_kwargs)
            state = pl.solve_steady(dev, drive, solver)
            linear, _, _ = closed_form(dev, drive, 0.0)
            deviations.append(abs(state.photon_number_1 - abs(linear) ** 2)
                              / abs(linear) ** 2)
        # zeta halves each step, deviation should fall by ~4x
        assert deviations[0] / deviations[1] == pytest.approx(4.0, rel=0.05)
        assert deviations[1] / deviations[2] == pytest.approx(4.0, rel=0.05)

    def test_nonconvergence_reports_residual(self, device):
        settings = pl.SolverSettings(max_iterations=2)
        with pytest.raises(pl.SolverError) as err:
            pl.solve_steady(device, _drive(device), settings)
        assert err.value.residual is not None
        assert err.value.iterations == 2

    def test_multistable_regime_detected(self, device, solver):
        dev = pl.with_coupling(device, 0.0)
        drive = pl.make_drive(dev, 50e-6, -3.0 * dev.gamma_1)
        with pytest.raises(pl.MultistableRegimeError) as err:
            pl.solve_steady(dev, drive, solver)
        assert len(err.value.fixed_points) >= 2


class TestForceBalance:
    def test_zero_state(self, device, solver):
        state = pl.solve_steady(device, _drive(device, power=0.0), solver)
        assert pl.force_balance_residual(state, device) == 0.0

    def test_converged_state_balances(self, device, solver):
        for sag in (-0.1, 0.0, 0.1):
            state = pl.solve_steady(device, _drive(device, 10e-6, 0.45, sag), solver)
            assert pl.force_balance_residual(state, device) <= 10 * solver.tolerance

    def test_perturbed_displacement_reads_ten_percent(self, device, solver):
        state = pl.solve_steady(device, _drive(device), solver)
        bumped = dataclasses.replace(state, x_s=1.1 * state.x_s)
        assert pl.force_balance_residual(bumped, device) == pytest.approx(0.1, abs=1e-9)


class TestDisplacementRatio:
    def test_all_stationary_gives_unity(self, device, solver):
        drive = _drive(device)
        assert pl.displacement_ratio(device, drive, drive, drive, solver) == (1.0, 1.0)

    def test_red_detuned_enhancement(self, device, solver):
        eta_gt, _ = pl.displacement_ratio(
            device,
            _drive(device, 10e-6, -0.6, +0.1),
            _drive(device, 10e-6, -0.6, -0.1),
            _drive(device, 10e-6, -0.6, 0.0),
            solver)
        assert eta_gt > 1.0

    def test_oracle_pair_at_paper_detuning(self, device, solver):
        # frozen from the 50-digit closed-form iteration
        eta_gt, eta_lt = pl.displacement_ratio(
            device,
            _drive(device, 10e-6, 0.45, +0.1),
            _drive(device, 10e-6, 0.45, -0.1),
            _drive(device, 10e-6, 0.45, 0.0),
            solver)
        assert eta_gt == pytest.approx(5.9205391370968511, rel=1e-9)
        assert eta_lt == pytest.approx(0.19547201832917813, rel=1e-9)

    def test_zero_reference_rejected(self, device, solver):
        with pytest.raises(pl.DomainError):
            pl.displacement_ratio(
                device,
                _drive(device, 0.0, 0.45, +0.1),
                _drive(device, 0.0, 0.45, -0.1),
                _drive(device, 0.0, 0.45, 0.0),
                solver)

    def test_mismatched_contexts_rejected(self, device, solver):
        with pytest.raises(pl.ValidationError):
            pl.displacement_ratio(
                device,
                _drive(device, 20e-6, 0.45, +0.1),
                _drive(device, 10e-6, 0.45, -0.1),
                _drive(device, 10e-6, 0.45, 0.0),
                solver)

    def test_wrong_shift_signs_rejected(self, device, solver):
        with pytest.raises(pl.ValidationError):
            pl.displacement_ratio(
                device,
                _drive(device, 10e-6, 0.45, -0.1),
                _drive(device, 10e-6, 0.45, +0.1),
                _drive(device, 10e-6, 0.45, 0.0),
                solver)


class TestSolverSettings:
    @pytest.mark.parametrize("kwargs", [
        {"tolerance": 0.0},
        {"tolerance": -1e-9},
        {"max_iterations": 0},
        {"relaxation": 0.0},
        {"relaxation": 1.5},
    ])
    def test_invalid_settings(self, kwargs):
        with pytest.raises(pl.ValidationError):
            pl.SolverSettings(**kwargs)


def test_balance_displacement_formula(device, solver):
    state = pl.solve_steady(device, _drive(device), solver)
    expected = (HBAR * device.zeta * state.photon_number_1
                / (device.effective_mass
                   * (device.mech_freq**2 + device.mech_damping**2)))
    assert balance_displacement(device, state.a1) == pytest.approx(expected, rel=1e-14)
