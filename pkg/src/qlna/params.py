"""Circuit and device parameter handling.

Reads the ``key = value`` configuration format, validates physical ranges,
and derives the MOS device capacitances and small-signal nonlinearity
constants used by the rest of the pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

from scipy.constants import epsilon_0, k as k_B

SIO2_RELATIVE_PERMITTIVITY = 3.9

# Damping rate default is omega_k / KAPPA_QUALITY, resolved once the mode
# frequencies are known (see response.resolve_kappas).
KAPPA_QUALITY = 50.0


class ConfigError(ValueError):
    """Raised for malformed or physically invalid configuration input."""


# Keys that must appear in a config file (the device / board data set).
REQUIRED_KEYS = (
    "W", "L_t", "t_SiO2", "L_ov", "T_c", "gamma",
    "C_f", "C_in", "C_d", "L_g", "L_d", "g_m2", "g_m3",
)

# Documented defaults for everything else.  kappa1/kappa2 default to None,
# meaning "omega_k / 50 once the modes are known".
DEFAULTS = {
    "g_m": 0.1,
    "V_rf": 3e-4,
    "omega_in": 2.0 * math.pi * 10e9,
    "R_s": 50.0,
    "phi1dc_rate": 0.0,
    "phi2dc": 0.0,
    "I_s0": 0.0,
    "I_d0": 0.0,
    "kappa1": None,
    "kappa2": None,
    "fock_dim": 16,
}

_POSITIVE = ("W", "L_t", "t_SiO2", "C_f", "C_in", "C_d", "L_g", "L_d", "R_s")
_NONNEGATIVE = ("L_ov", "T_c", "g_m", "I_s0", "I_d0")


@dataclass(frozen=True)
class CircuitParams:
    """Validated physical / circuit inputs plus solver knobs.

    Immutable after construction; safe to share across parallel workers.
    ``T_c = 0`` is accepted as the exact zero-thermal-noise limit.
    """

    W: float
    L_t: float
    t_SiO2: float
    L_ov: float
    T_c: float
    gamma: float
    C_f: float
    C_in: float
    C_d: float
    L_g: float
    L_d: float
    g_m: float
    g_m2: float
    g_m3: float
    V_rf: float
    omega_in: float
    R_s: float
    phi1dc_rate: float
    phi2dc: float
    I_s0: float
    I_d0: float
    kappa1: float | None
    kappa2: float | None
    fock_dim: int
    defaulted: tuple[str, ...] = ()

    def __post_init__(self):
        for key in _POSITIVE:
            if not getattr(self, key) > 0:
                raise ConfigError(f"{key} must be positive")
        for key in _NONNEGATIVE:
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be non-negative")
        if not 0 < self.gamma <= 2:
            raise ConfigError("gamma must lie in (0, 2]")
        if not self.omega_in > 0:
            raise ConfigError("omega_in must be positive")
        for key in ("kappa1", "kappa2"):
            value = getattr(self, key)
            if value is not None and value < 0:
                raise ConfigError(f"{key} must be non-negative")
        if self.fock_dim < 4:
            raise ConfigError("fock_dim must be at least 4")


@dataclass(frozen=True)
class DeviceCaps:
    """Gate-source / gate-drain capacitances from the parallel-plate model."""

    C_gs: float
    C_gd: float
    C_ox_area: float

    def __post_init__(self):
        if self.C_ox_area <= 0 or self.C_gs <= 0:
            raise ConfigError("device capacitances must be positive")
        if self.C_gd < 0 or self.C_gd > self.C_gs:
            raise ConfigError("C_gd must satisfy 0 <= C_gd <= C_gs")


@dataclass(frozen=True)
class Nonlinearity:
    """Linearized nonlinearity constants at the operating point."""

    g_m3L: float
    g_NL: float
    C_N: float


def _parse_value(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"malformed number for key {key}: {raw!r}") from None


def load_config(path: str | Path) -> CircuitParams:
    """Parse a UTF-8 ``key = value`` config file into CircuitParams.

    Lines starting with ``#`` (and inline ``#`` comments) are ignored.  All
    values are plain SI numbers.  Unknown keys are rejected; missing optional
    keys take the documented defaults and are recorded in ``defaulted``.
    """
    path = Path(path)
    known = {f.name for f in fields(CircuitParams)} - {"defaulted"}
    values: dict[str, float] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw)

    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    defaulted = []
    for key, default in DEFAULTS.items():
        if key not in values:
            values[key] = default
            defaulted.append(key)
    values["fock_dim"] = int(values["fock_dim"])
    return CircuitParams(**values, defaulted=tuple(sorted(defaulted)))


def default_config_path() -> Path:
    """Path of the shipped device data fixture (table1.cfg)."""
    return Path(resources.files("qlna").joinpath("data/table1.cfg"))


def derive_device_caps(p: CircuitParams) -> DeviceCaps:
    """Parallel-plate device capacitances from the layout geometry.

    C_gs carries the 2/3 channel factor of a long-channel MOSFET in
    saturation plus the gate-drain overlap contribution.
    """
    c_ox = epsilon_0 * SIO2_RELATIVE_PERMITTIVITY / p.t_SiO2
    c_gd = p.W * p.L_ov * c_ox
    c_gs = (2.0 / 3.0) * p.W * p.L_t * c_ox + p.W * p.L_ov * c_ox
    return DeviceCaps(C_gs=c_gs, C_gd=c_gd, C_ox_area=c_ox)


def derive_nonlinearity(p: CircuitParams) -> Nonlinearity:
    """Nonlinearity constants linearized at the DC operating point."""
    g_m3l = p.g_m3 * p.phi1dc_rate
    g_nl = p.g_m2 + 2.0 * g_m3l
    c_n = (2.0 * p.g_m2 + 3.0 * g_m3l) * p.phi2dc
    return Nonlinearity(g_m3L=g_m3l, g_NL=g_nl, C_N=c_n)


def bias_noise_currents(p: CircuitParams) -> tuple[float, float]:
    """Mean source / drain currents including the rms noise contributions.

    The source term adds sqrt(4 k_B T R_s) and the drain term
    sqrt(4 k_B T gamma g_m) on top of the DC bias currents.  The source
    formula is kept in its reference form even though its radicand carries
    units of A^2 Ohm^2 rather than A^2.
    """
    i_s = p.I_s0 + math.sqrt(4.0 * k_B * p.T_c * p.R_s)
    i_d = p.I_d0 + math.sqrt(4.0 * k_B * p.T_c * p.gamma * p.g_m)
    return i_s, i_d
