"""Config parsing, validation and device-level derivations."""

import dataclasses
import math

import pytest
from scipy.constants import epsilon_0, k as k_B

from qlna.params import (
    DEFAULTS,
    KAPPA_QUALITY,
    REQUIRED_KEYS,
    ConfigError,
    bias_noise_currents,
    default_config_path,
    derive_device_caps,
    derive_nonlinearity,
    load_config,
)


def test_fixture_loads_with_expected_values(params):
    assert params.W == pytest.approx(300e-6)
    assert params.t_SiO2 == pytest.approx(200e-9)
    assert params.gamma == pytest.approx(2 / 3)
    assert params.g_m == 0.1
    assert params.V_rf == 3e-4


def test_fixture_records_defaulted_keys(params):
    # g_m and V_rf are set in the file; everything else optional defaults.
    assert "g_m" not in params.defaulted
    assert "kappa1" in params.defaulted
    assert "fock_dim" in params.defaulted
    assert params.kappa1 is None and params.kappa2 is None
    assert params.fock_dim == 16


def test_default_config_path_exists():
    assert default_config_path().exists()


def test_comments_and_blank_lines_ignored(write_cfg, base_config):
    path = write_cfg(base_config)
    text = "# leading comment\n\n" + path.read_text()
    text = text.replace("W = 0.0003", "W = 0.0003   # width")
    path.write_text(text)
    p = load_config(path)
    assert p.W == pytest.approx(300e-6)


def test_unknown_key_rejected_by_name(write_cfg, base_config):
    base_config["C_gs"] = 1e-12
    with pytest.raises(ConfigError, match="C_gs"):
        load_config(write_cfg(base_config))


def test_duplicate_key_rejected(write_cfg, base_config):
    path = write_cfg(base_config)
    path.write_text(path.read_text() + "W = 1e-4\n")
    with pytest.raises(ConfigError, match="duplicate.*W"):
        load_config(path)


def test_malformed_number_names_the_key(write_cfg, base_config):
    base_config["L_g"] = "1.2nH"
    with pytest.raises(ConfigError, match="L_g"):
        load_config(write_cfg(base_config))


def test_missing_required_key_reported(write_cfg, base_config):
    del base_config["C_in"]
    with pytest.raises(ConfigError, match="C_in"):
        load_config(write_cfg(base_config))


def test_line_without_equals_rejected(write_cfg, base_config):
    path = write_cfg(base_config)
    path.write_text(path.read_text() + "not a key value line\n")
    with pytest.raises(ConfigError, match="key = value"):
        load_config(path)


def test_required_keys_cover_device_data():
    assert set(REQUIRED_KEYS) == {
        "W", "L_t", "t_SiO2", "L_ov", "T_c", "gamma",
        "C_f", "C_in", "C_d", "L_g", "L_d", "g_m2", "g_m3",
    }
    assert DEFAULTS["V_rf"] == 3e-4
    assert DEFAULTS["omega_in"] == pytest.approx(2 * math.pi * 10e9)


@pytest.mark.parametrize("key,bad", [
    ("W", -1e-6), ("t_SiO2", 0.0), ("R_s", -50.0),
    ("L_g", 0.0), ("C_in", -1e-12),
])
def test_positive_fields_validated(params, key, bad):
    with pytest.raises(ConfigError, match=key):
        dataclasses.replace(params, **{key: bad})


def test_gamma_range(params):
    with pytest.raises(ConfigError, match="gamma"):
        dataclasses.replace(params, gamma=0.0)
    with pytest.raises(ConfigError, match="gamma"):
        dataclasses.replace(params, gamma=2.5)
    dataclasses.replace(params, gamma=2.0)  # boundary is allowed


def test_fock_dim_minimum(params):
    with pytest.raises(ConfigError, match="fock_dim"):
        dataclasses.replace(params, fock_dim=3)


def test_negative_kappa_rejected(params):
    with pytest.raises(ConfigError, match="kappa1"):
        dataclasses.replace(params, kappa1=-1.0)


def test_zero_temperature_and_overlap_allowed(params):
    p = dataclasses.replace(params, T_c=0.0, L_ov=0.0)
    assert p.T_c == 0.0
    caps = derive_device_caps(p)
    assert caps.C_gd == 0.0


def test_device_caps_against_parallel_plate_formulas(params):
    caps = derive_device_caps(params)
    c_ox = epsilon_0 * 3.9 / params.t_SiO2
    assert caps.C_ox_area == pytest.approx(c_ox, rel=1e-15)
    assert caps.C_gd == pytest.approx(params.W * params.L_ov * c_ox, rel=1e-15)
    expected_gs = (2 / 3) * params.W * params.L_t * c_ox + caps.C_gd
    assert caps.C_gs == pytest.approx(expected_gs, rel=1e-15)
    assert caps.C_gd < caps.C_gs


def test_device_caps_fixture_magnitudes(params):
    # Sanity anchors computed by hand from the fixture geometry.
    caps = derive_device_caps(params)
    assert caps.C_ox_area == pytest.approx(1.7266e-4, rel=1e-3)
    assert caps.C_gd == pytest.approx(2.58985e-13, rel=1e-3)
    assert caps.C_gs == pytest.approx(1.98555e-12, rel=1e-3)


def test_nonlinearity_defaults_to_static_bias(params):
    # phi1dc_rate = phi2dc = 0 in the fixture.
    nl = derive_nonlinearity(params)
    assert nl.g_m3L == 0.0
    assert nl.g_NL == params.g_m2
    assert nl.C_N == 0.0


def test_nonlinearity_with_nonzero_bias(params):
    p = dataclasses.replace(params, phi1dc_rate=0.2, phi2dc=1e-12)
    nl = derive_nonlinearity(p)
    assert nl.g_m3L == pytest.approx(p.g_m3 * 0.2)
    assert nl.g_NL == pytest.approx(p.g_m2 + 2 * nl.g_m3L)
    assert nl.C_N == pytest.approx((2 * p.g_m2 + 3 * nl.g_m3L) * 1e-12)


def test_bias_noise_currents(params):
    i_s, i_d = bias_noise_currents(params)
    assert i_s == pytest.approx(math.sqrt(4 * k_B * 4.0 * params.R_s))
    assert i_d == pytest.approx(
        math.sqrt(4 * k_B * 4.0 * params.gamma * params.g_m))


def test_bias_noise_vanishes_at_zero_temperature(decoupled):
    assert bias_noise_currents(decoupled) == (0.0, 0.0)


def test_kappa_quality_constant():
    assert KAPPA_QUALITY == 50.0
