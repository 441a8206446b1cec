import dataclasses
import math

import pytest

import phonolaser as pl
from phonolaser.constants import HBAR, SPEED_OF_LIGHT

WM = 2 * math.pi * 23.4e6


def _raw(**overrides):
    base = dict(
        refractive_index=1.48, radius_com=34.5e-6, radius_spin=4.75e-3,
        quality_com=9.7e7, quality_spin=3.0e7, effective_mass=50e-12,
        mech_freq=WM, mech_damping=0.24e6, optical_coupling=0.5 * WM,
        wavelength=1550e-9)
    base.update(overrides)
    return pl.RawDeviceSpec(**base)


class TestDeriveDevice:
    def test_paper_parameters_against_high_precision_oracle(self, si_device):
        # frozen from a 50-digit mpmath evaluation of the closed forms
        assert si_device.gamma_1 == pytest.approx(12528444.079207538, rel=1e-12)
        assert si_device.gamma_2 == pytest.approx(40508635.856104372, rel=1e-12)
        assert si_device.gamma == pytest.approx(26518539.967655955, rel=1e-12)
        assert si_device.zeta == pytest.approx(3.5224900744438584e19, rel=1e-12)
        assert si_device.x_zpf == pytest.approx(8.4691576595998261e-17, rel=1e-12)
        assert si_device.g_om == pytest.approx(2983.2523794840565, rel=1e-12)

    def test_lossless_limit(self):
        dev = pl.derive_device(_raw(quality_com=1e30))
        assert dev.gamma_1 <= 1e-12 * dev.resonance

    def test_mass_scaling_of_zero_point_amplitude(self):
        light = pl.derive_device(_raw())
        heavy = pl.derive_device(_raw(effective_mass=100e-12))
        assert heavy.x_zpf == pytest.approx(light.x_zpf / math.sqrt(2), rel=1e-12)

    def test_idempotent_and_bit_identical(self, si_device):
        again = pl.derive_device(si_device.raw)
        for field in dataclasses.fields(pl.DeviceParams):
            assert getattr(again, field.name) == getattr(si_device, field.name)

    def test_gamma_is_arithmetic_mean(self, si_device):
        assert si_device.gamma == (si_device.gamma_1 + si_device.gamma_2) / 2

    def test_wavelength_resonance_consistency(self, si_device):
        assert si_device.wavelength == pytest.approx(
            2 * math.pi * SPEED_OF_LIGHT / si_device.resonance, rel=1e-14)

    @pytest.mark.parametrize("field,value", [
        ("radius_com", -1.0),
        ("radius_com", 0.0),
        ("effective_mass", float("nan")),
        ("quality_spin", 0.0),
        ("mech_freq", -5.0),
        ("refractive_index", 0.9),
        ("mech_damping", -1.0),
        ("optical_coupling", -1.0),
    ])
    def test_validation_names_the_field(self, field, value):
        with pytest.raises(pl.ValidationError) as err:
            _raw(**{field: value})
        assert field in str(err.value)

    def test_missing_both_resonance_and_wavelength(self):
        with pytest.raises(pl.ValidationError):
            _raw(wavelength=None)

    def test_inconsistent_resonance_wavelength_pair(self):
        with pytest.raises(pl.ValidationError):
            _raw(resonance=1e15)  # wavelength=1550nm also set


class TestSagnacShift:
    def test_zero_spin(self, device):
        assert pl.sagnac_shift(0.0, pl.Direction.LEFT, device) == 0.0

    def test_antisymmetry_in_spin(self, device):
        for spin in (100.0, 6000.0, 2.5e4):
            assert pl.sagnac_shift(spin, pl.Direction.LEFT, device) == \
                -pl.sagnac_shift(-spin, pl.Direction.LEFT, device)

    def test_direction_swap_equals_spin_reversal(self, device):
        for spin in (-7e3, -12.0, 55.0, 6e3):
            assert pl.sagnac_shift(spin, pl.Direction.LEFT, device) == \
                pl.sagnac_shift(-spin, pl.Direction.RIGHT, device)

    def test_ccw_left_drive_is_positive(self, device):
        assert pl.sagnac_shift(6000.0, pl.Direction.LEFT, device) > 0
        assert pl.sagnac_shift(6000.0, pl.Direction.RIGHT, device) < 0

    def test_paper_operating_point(self, device):
        # the calibrated device puts Omega = 6 kHz at Delta_sag ~ 0.1 omega_m
        ratio = pl.sagnac_shift(6000.0, pl.Direction.LEFT, device) / device.mech_freq
        assert ratio == pytest.approx(0.1, rel=0.02)

    def test_dispersion_term_enters_as_written(self):
        n = 1.48
        plain = pl.derive_device(_raw())
        dispersive = pl.derive_device(_raw(dispersion_coeff=0.04))
        shift_plain = pl.sagnac_shift(6000.0, pl.Direction.LEFT, plain)
        shift_disp = pl.sagnac_shift(6000.0, pl.Direction.LEFT, dispersive)
        factor = (1 - 1 / n**2) / (1 - 1 / n**2 - 0.04)
        assert shift_plain / shift_disp == pytest.approx(factor, rel=1e-12)

    def test_spin_for_shift_round_trip(self, device):
        shift = 0.1 * device.mech_freq
        spin = pl.spin_for_shift(shift, pl.Direction.LEFT, device)
        assert pl.sagnac_shift(spin, pl.Direction.LEFT, device) == \
            pytest.approx(shift, rel=1e-14)


class TestDriveAmplitude:
    def test_zero_power(self, device):
        assert pl.drive_amplitude(0.0, 0.45 * device.mech_freq, device) == 0.0

    def test_square_root_law(self, device):
        base = pl.drive_amplitude(10e-6, 0.0, device)
        assert pl.drive_amplitude(40e-6, 0.0, device) == pytest.approx(2 * base, rel=1e-12)

    def test_negative_power_rejected(self, device):
        with pytest.raises(pl.ValidationError):
            pl.drive_amplitude(-1e-6, 0.0, device)

    def test_oracle_value_si_device(self, si_device):
        eps = pl.drive_amplitude(10e-6, 0.45 * si_device.mech_freq, si_device)
        assert eps == pytest.approx(44217179677.142896, rel=1e-12)

    def test_oracle_value_calibrated_device(self, device):
        eps = pl.drive_amplitude(10e-6, 0.45 * device.mech_freq, device)
        assert eps == pytest.approx(44217173318.035853, rel=1e-12)

    def test_amplitude_squared_per_power_constant(self, device):
        dl = 0.45 * device.mech_freq
        ratios = [pl.drive_amplitude(p, dl, device) ** 2 / p
                  for p in (1e-9, 1e-6, 3.7e-5, 2e-3)]
        for r in ratios[1:]:
            assert r == pytest.approx(ratios[0], rel=1e-12)


class TestRwaMargin:
    def test_exact_resonance(self):
        assert pl.rwa_margin(pl.derive_device(_raw(optical_coupling=0.5 * WM))) == 0.0

    def test_ten_percent_detuned(self):
        dev = pl.derive_device(_raw(optical_coupling=0.55 * WM))
        assert pl.rwa_margin(dev) == pytest.approx(0.1, rel=1e-12)

    def test_invalid_regime_flagged(self):
        dev = pl.derive_device(_raw(optical_coupling=WM))
        assert pl.rwa_margin(dev) == pytest.approx(1.0, rel=1e-12)


class TestMakeDrive:
    def test_sign_invariants(self, device):
        for direction in (pl.Direction.LEFT, pl.Direction.RIGHT):
            for spin in (-6000.0, 0.0, 6000.0):
                drive = pl.make_drive(device, 1e-6, 0.0, direction, omega_spin=spin)
                expected_sign = (1 if direction is pl.Direction.LEFT else -1) * spin
                assert math.copysign(1, drive.sagnac_shift) == math.copysign(1, expected_sign) \
                    or drive.sagnac_shift == 0.0

    def test_sagnac_keyword_produces_consistent_spin(self, device):
        drive = pl.make_drive(device, 1e-6, 0.0, pl.Direction.RIGHT,
                              sagnac=-0.1 * device.mech_freq)
        assert drive.sagnac_shift == pytest.approx(-0.1 * device.mech_freq)
        assert pl.sagnac_shift(drive.omega_spin, drive.direction, device) == \
            pytest.approx(drive.sagnac_shift, rel=1e-14)

    def test_mirrored_drive_negates_shift(self, device):
        drive = pl.make_drive(device, 1e-6, 0.0, omega_spin=6000.0)
        mirror = pl.mirrored_drive(device, drive)
        assert mirror.sagnac_shift == -drive.sagnac_shift
        assert mirror.pump_power == drive.pump_power


def test_codata_constants_pinned():
    assert HBAR == 1.0545718176461565e-34
    assert SPEED_OF_LIGHT == 299792458.0
