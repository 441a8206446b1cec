import copy
import json
import math

import pytest

import phonolaser as pl
from phonolaser.config import parse_config


def _minimal():
    return {
        "device": {
            "refractive_index": {"value": 1.48, "unit": "1"},
            "radius_com": {"value": 34.5, "unit": "um"},
            "radius_spin": {"value": 4.75, "unit": "mm"},
            "quality_com": {"value": 9.7e7, "unit": "1"},
            "quality_spin": {"value": 3.0e7, "unit": "1"},
            "effective_mass": {"value": 50.0, "unit": "ng"},
            "mech_freq": {"value": 23.4e6, "unit": "Hz_x2pi"},
            "mech_damping": {"value": 0.24e6, "unit": "rad/s"},
            "wavelength": {"value": 1550.0, "unit": "nm"},
            "optical_coupling": {"value": 0.5, "unit": "omega_m"},
        },
    }


def test_bundled_paper_config_resolves_calibrated_rates(paper):
    dev = paper.device
    assert dev.resonance == pytest.approx(193414489032258.06, rel=1e-12)
    assert dev.gamma_1 == pytest.approx(1993963.8044562687, rel=1e-12)
    assert dev.gamma_2 == pytest.approx(6447149.6344086022, rel=1e-12)
    assert dev.mech_freq == pytest.approx(2 * math.pi * 23.4e6, rel=1e-14)
    assert dev.optical_coupling == pytest.approx(0.5 * dev.mech_freq, rel=1e-14)
    assert dev.g_om == pytest.approx(474.79936268554636, rel=1e-12)
    assert paper.drive.pump_power == pytest.approx(10e-6)
    assert paper.drive.detuning == pytest.approx(0.45 * dev.mech_freq)
    assert paper.solver.tolerance == 1e-12


def test_unit_conversions():
    cfg = parse_config(_minimal())
    dev = cfg.device
    assert dev.radius_com == pytest.approx(34.5e-6, rel=1e-14)
    assert dev.radius_spin == pytest.approx(4.75e-3, rel=1e-14)
    assert dev.effective_mass == pytest.approx(50e-12, rel=1e-14)
    assert dev.wavelength == pytest.approx(1550e-9, rel=1e-14)
    assert dev.resonance == pytest.approx(
        2 * math.pi * 299792458.0 / 1550e-9, rel=1e-14)


def test_mech_damping_both_readings():
    data = _minimal()
    angular = parse_config(copy.deepcopy(data))
    data["device"]["mech_damping"] = {"value": 0.24e6, "unit": "Hz_x2pi"}
    cyclic = parse_config(data)
    assert cyclic.device.mech_damping == pytest.approx(
        2 * math.pi * angular.device.mech_damping, rel=1e-14)


def test_unknown_unit_rejected():
    data = _minimal()
    data["device"]["mech_freq"] = {"value": 23.4, "unit": "MHz"}
    with pytest.raises(pl.ValidationError) as err:
        parse_config(data)
    assert "mech_freq" in str(err.value) and "MHz" in str(err.value)


def test_unknown_device_field_rejected():
    data = _minimal()
    data["device"]["coupling_rate"] = {"value": 1.0, "unit": "rad/s"}
    with pytest.raises(pl.ValidationError) as err:
        parse_config(data)
    assert "coupling_rate" in str(err.value)


def test_unknown_section_rejected():
    data = _minimal()
    data["devices"] = {}
    with pytest.raises(pl.ValidationError):
        parse_config(data)


def test_missing_required_field_rejected():
    data = _minimal()
    del data["device"]["effective_mass"]
    with pytest.raises(pl.ValidationError) as err:
        parse_config(data)
    assert "effective_mass" in str(err.value)


def test_bare_number_rejected():
    data = _minimal()
    data["device"]["quality_com"] = 9.7e7
    with pytest.raises(pl.ValidationError):
        parse_config(data)


def test_omega_m_unit_not_allowed_for_mech_freq():
    data = _minimal()
    data["device"]["mech_freq"] = {"value": 1.0, "unit": "omega_m"}
    with pytest.raises(pl.ValidationError):
        parse_config(data)


def test_spin_as_sagnac_ratio():
    data = _minimal()
    data["drive"] = {
        "pump_power": {"value": 10.0, "unit": "uW"},
        "detuning": {"value": 0.45, "unit": "omega_m"},
        "direction": "left",
        "spin": {"value": 0.1, "unit": "sagnac_ratio"},
    }
    cfg = parse_config(data)
    assert cfg.drive.sagnac_shift == pytest.approx(0.1 * cfg.device.mech_freq, rel=1e-14)
    assert pl.sagnac_shift(cfg.drive.omega_spin, cfg.drive.direction, cfg.device) == \
        pytest.approx(cfg.drive.sagnac_shift, rel=1e-14)


def test_spin_as_rate():
    data = _minimal()
    data["drive"] = {"spin": {"value": 6000.0, "unit": "rad/s"}}
    cfg = parse_config(data)
    assert cfg.drive.omega_spin == 6000.0


def test_bad_direction_rejected():
    data = _minimal()
    data["drive"] = {"direction": "sideways"}
    with pytest.raises(pl.ValidationError) as err:
        parse_config(data)
    assert "direction" in str(err.value)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "dev.json"
    path.write_text(json.dumps(_minimal()))
    cfg = pl.load_config(path)
    assert cfg.device.quality_com == 9.7e7
    assert cfg.source == _minimal()
