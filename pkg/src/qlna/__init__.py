"""Quantum two-oscillator model of a common-source low-noise amplifier.

Derives the circuit-quantization constants from device data, assembles the
coupled-oscillator Hamiltonian in a truncated Fock basis, evaluates spectra
and first-order perturbative state mixing, and computes driven photon
numbers, voltage/current fluctuations and the photon-number-dependent noise
figure over (drive frequency, transconductance) sweeps.
"""

__version__ = "0.1.0"

from .constants import CircuitConstants, derive_constants
from .params import CircuitParams, default_config_path, load_config

__all__ = [
    "CircuitConstants",
    "CircuitParams",
    "default_config_path",
    "derive_constants",
    "load_config",
    "__version__",
]
