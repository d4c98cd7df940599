"""Shared fixtures: the packaged device data set and derived constants."""

import dataclasses

import pytest

from qlna import constants as qconst
from qlna.params import default_config_path, load_config


@pytest.fixture(scope="session")
def params():
    return load_config(default_config_path())


@pytest.fixture(scope="session")
def consts(params):
    return qconst.derive_constants(params)


@pytest.fixture(scope="session")
def decoupled(params):
    """Zero transconductance, drive, overlap and thermal noise."""
    return dataclasses.replace(
        params, g_m=0.0, V_rf=0.0, L_ov=0.0, T_c=0.0, I_s0=0.0, I_d0=0.0,
    )


@pytest.fixture(scope="session")
def decoupled_consts(decoupled):
    return qconst.derive_constants(decoupled)


@pytest.fixture
def write_cfg(tmp_path):
    """Write a config file from a key -> value mapping, return its path."""

    def _write(values, name="test.cfg"):
        path = tmp_path / name
        path.write_text(
            "\n".join(f"{k} = {v}" for k, v in values.items()) + "\n",
            encoding="utf-8",
        )
        return path

    return _write


BASE_CONFIG = {
    "W": 300e-6, "L_t": 50e-6, "t_SiO2": 200e-9, "L_ov": 5e-6,
    "T_c": 4, "gamma": 2 / 3, "C_f": 0.2e-12, "C_in": 1.8e-12,
    "C_d": 0.08e-12, "L_g": 1.2e-9, "L_d": 0.95e-9,
    "g_m2": 0.25, "g_m3": 1.3,
}


@pytest.fixture
def base_config():
    return dict(BASE_CONFIG)
