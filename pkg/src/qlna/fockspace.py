"""Truncated two-mode Fock-space operators and Hamiltonian assembly.

Dense complex matrices throughout; the tensor convention is fixed with
mode 1 varying slowest, i.e. a basis state (j1, j2) sits at flat index
``j1 * dim + j2``.  The unperturbed Hamiltonian is assembled term by term
from its reference ladder-operator form, which is genuinely non-Hermitian;
the hermiticity defect is reported by callers, never asserted away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .constants import CircuitConstants


def ladder(dim: int) -> np.ndarray:
    """Single-mode annihilation operator, a[n-1, n] = sqrt(n)."""
    if dim < 2:
        raise ValueError("Fock dimension must be at least 2")
    a = np.zeros((dim, dim), dtype=complex)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def embed(op: np.ndarray, which: int, dim: int) -> np.ndarray:
    """Lift a single-mode operator into the two-mode product space.

    Mode 1 varies slowest: embed(op, 1) = op (x) I, embed(op, 2) = I (x) op.
    """
    if op.shape != (dim, dim):
        raise ValueError(f"operator shape {op.shape} does not match dim {dim}")
    eye = np.eye(dim, dtype=complex)
    if which == 1:
        return np.kron(op, eye)
    if which == 2:
        return np.kron(eye, op)
    raise ValueError("which must be 1 or 2")


def flat_index(j1: int, j2: int, dim: int) -> int:
    if not (0 <= j1 < dim and 0 <= j2 < dim):
        raise IndexError(f"state ({j1}, {j2}) outside dim {dim}")
    return j1 * dim + j2


@dataclass(frozen=True)
class TwoModeOps:
    """Bare ladder/quadrature operators of both modes (dim^2 x dim^2)."""

    dim: int
    a1: np.ndarray
    a2: np.ndarray
    phi1: np.ndarray
    q1: np.ndarray
    phi2: np.ndarray
    q2: np.ndarray
    # sum/difference combinations reused by every Hamiltonian term
    x1: np.ndarray  # a1 + a1^dag
    y1: np.ndarray  # a1 - a1^dag
    x2: np.ndarray
    y2: np.ndarray


def two_mode_ops(z1: float, z2: float, dim: int) -> TwoModeOps:
    a = ladder(dim)
    a1 = embed(a, 1, dim)
    a2 = embed(a, 2, dim)
    x1, y1 = a1 + a1.conj().T, a1 - a1.conj().T
    x2, y2 = a2 + a2.conj().T, a2 - a2.conj().T
    return TwoModeOps(
        dim=dim,
        a1=a1, a2=a2,
        phi1=np.sqrt(hbar * z1 / 2) * x1,
        q1=-1j * np.sqrt(hbar / (2 * z1)) * y1,
        phi2=np.sqrt(hbar * z2 / 2) * x2,
        q2=-1j * np.sqrt(hbar / (2 * z2)) * y2,
        x1=x1, y1=y1, x2=x2, y2=y2,
    )


def build_h0(consts: CircuitConstants, dim: int) -> np.ndarray:
    """Unperturbed Hamiltonian: linear part plus the quadratic nonlinear part.

    Every operator term is kept with its reference coefficient (including the
    zero-point 1/2 offsets); purely scalar drive terms are dropped.
    """
    if dim < 4:
        raise ValueError("dim must be at least 4")
    rc, modes, drv = consts.recips, consts.modes, consts.drive
    g_m, v_rf = consts.g_m, consts.v_rf
    g_nl = consts.nonlinearity.g_NL
    z1, z2 = modes.z1, modes.z2
    sz12 = np.sqrt(z1 * z2)
    ops = two_mode_ops(z1, z2, dim)
    eye = np.eye(dim * dim, dtype=complex)
    n1 = ops.a1.conj().T @ ops.a1
    n2 = ops.a2.conj().T @ ops.a2

    h = hbar * modes.omega1 * (n1 + 0.5 * eye)
    h = h + hbar * modes.omega2 * (n2 + 0.5 * eye)
    h = h - hbar * rc.r_q1q2 / (2 * sz12) * (ops.y1 @ ops.y2)
    h = h - 1j * hbar * g_m * rc.r_q1p1 / 2 * (ops.y1 @ ops.x1)
    h = h - 1j * hbar * g_m * rc.r_q2p2 / 2 * (ops.y2 @ ops.x2)
    h = h - 1j * hbar * g_m * rc.r_q1p2 / 2 * np.sqrt(z2 / z1) * (ops.y1 @ ops.x2)
    h = h + hbar * g_m ** 2 * rc.r_q1p2 / 2 * sz12 * (ops.x1 @ ops.x2)
    h = h - 1j * hbar * g_m * rc.r_q2p1 / 2 * (ops.x1 @ ops.y2)
    h = h + drv.p1_gmvrf / 2 * np.sqrt(hbar * z1 / 2) * ops.x1
    h = h + drv.p2_gmvrf / 2 * np.sqrt(hbar * z2 / 2) * ops.x2
    h = h - 1j * drv.g1 * v_rf * g_m / 2 * np.sqrt(hbar / (2 * z1)) * ops.y1
    h = h - 1j * drv.g2 * v_rf * g_m / 2 * np.sqrt(hbar / (2 * z2)) * ops.y2

    nl2 = hbar * g_m * v_rf * rc.rp_p1p2 / 2 * sz12 * (ops.x1 @ ops.x2)
    nl2 = nl2 + (consts.inverse.c11 ** 2 * consts.cap_matrix.c_in ** 2
                 * v_rf ** 2 * np.sqrt(hbar * z2 / 2)) * ops.x2
    nl2 = nl2 - 1j * hbar * g_m * v_rf * rc.rp_q1p2 / 2 * np.sqrt(z2 / z1) \
        * (ops.y1 @ ops.x2)
    nl2 = nl2 - 1j * hbar * v_rf * rc.rp_q2p2 / 2 * (ops.y2 @ ops.x2)
    return h + g_nl * nl2


def build_hp(consts: CircuitConstants, dim: int,
             even_mode1_only: bool = False) -> np.ndarray:
    """Cubic perturbation Hamiltonian.

    With ``even_mode1_only`` the two cross terms of odd degree in mode 1
    (the C11*C12 terms) are excluded, leaving the part that conserves the
    mode-1 occupation parity; this restriction is what the second-oscillator
    state-mixing analysis (and its selection rule) is defined on.
    """
    if dim < 4:
        raise ValueError("dim must be at least 4")
    modes = consts.modes
    g_m = consts.g_m
    g_nl = consts.nonlinearity.g_NL
    c11, c12 = consts.inverse.c11, consts.inverse.c12
    z1, z2 = modes.z1, modes.z2
    ops = two_mode_ops(z1, z2, dim)

    t = -hbar / (2 * z1) * c11 ** 2 * (ops.y1 @ ops.y1)
    t = t - hbar / (2 * z2) * c12 ** 2 * (ops.y2 @ ops.y2)
    t = t + hbar * z1 * g_m ** 2 / 2 * c11 ** 2 * (ops.x1 @ ops.x1)
    t = t - 1j * hbar / 2 * (2 * c11 ** 2 * g_m) * (ops.y1 @ ops.x1)
    if not even_mode1_only:
        t = t - hbar / (2 * np.sqrt(z1 * z2)) * 2 * c12 * c11 * (ops.y1 @ ops.y2)
        t = t - 1j * hbar / 2 * (2 * c11 * c12 * g_m) * np.sqrt(z1 / z2) \
            * (ops.y2 @ ops.x1)
    return g_nl * (t @ (np.sqrt(hbar * z2 / 2) * ops.x2))


def build_vi_operators(consts: CircuitConstants, dim: int
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Voltage and current operators of both oscillators.

    Linear combinations of the quadrature operators with scalar drive
    offsets carried as identity multiples.
    """
    rc, modes, drv = consts.recips, consts.modes, consts.drive
    p = consts.params
    g_m, v_rf = consts.g_m, consts.v_rf
    g_nl = consts.nonlinearity.g_NL
    ops = two_mode_ops(modes.z1, modes.z2, dim)
    eye = np.eye(dim * dim, dtype=complex)
    phi1, q1, phi2, q2 = ops.phi1, ops.q1, ops.phi2, ops.q2

    v1 = (2 * rc.r_q1 * q1 + 2 * rc.r_q1q2 * q2
          + g_m * rc.r_q2p1 * phi1
          + (g_m * rc.r_q1p2 + g_nl * v_rf * rc.rp_q1p2) * phi2
          + drv.g1 * v_rf / 2 * eye)
    i1 = -(phi1 / p.L_g + g_m * rc.r_q1p1 * q1 + g_m * rc.r_q2p1 * q2
           + (g_m ** 2 * rc.r_p1p2 + g_m * g_nl * v_rf * rc.rp_p1p2) * phi2
           + drv.p1_gmvrf / 2 * eye)
    v2 = (2 * rc.r_q2 * q2 + 2 * rc.r_q1q2 * q1
          + g_m * rc.r_q2p1 * phi1
          + (g_m * rc.r_q2p2 + g_nl * v_rf * rc.rp_q2p2) * phi2
          + drv.g2 * v_rf / 2 * eye)
    i2 = -(phi2 / p.L_d
           + (g_m * rc.r_q2p2 + g_nl * v_rf * rc.rp_q2p2) * q2
           + (g_m * rc.r_q1p2 + g_nl * v_rf * rc.rp_q1p2) * q1
           + (g_m ** 2 * rc.r_p1p2 + g_m * g_nl * v_rf * rc.rp_p1p2) * phi1
           + drv.p2_gmvrf / 2 * eye)
    return v1, i1, v2, i2


@dataclass(frozen=True)
class OperatorSet:
    """Immutable bundle of every two-mode matrix for one parameter point."""

    dim: int
    z1: float
    z2: float
    a1: np.ndarray
    a2: np.ndarray
    phi1: np.ndarray
    q1: np.ndarray
    phi2: np.ndarray
    q2: np.ndarray
    h0: np.ndarray
    hp: np.ndarray
    v1: np.ndarray
    i1: np.ndarray
    v2: np.ndarray
    i2: np.ndarray


def build_operator_set(consts: CircuitConstants, dim: int | None = None) -> OperatorSet:
    dim = consts.params.fock_dim if dim is None else dim
    modes = consts.modes
    ops = two_mode_ops(modes.z1, modes.z2, dim)
    v1, i1, v2, i2 = build_vi_operators(consts, dim)
    return OperatorSet(
        dim=dim, z1=modes.z1, z2=modes.z2,
        a1=ops.a1, a2=ops.a2,
        phi1=ops.phi1, q1=ops.q1, phi2=ops.phi2, q2=ops.q2,
        h0=build_h0(consts, dim),
        hp=build_hp(consts, dim),
        v1=v1, i1=i1, v2=v2, i2=i2,
    )


def hermitized(h: np.ndarray) -> np.ndarray:
    """Hermitian part (H + H^dag)/2, for sanity comparisons."""
    return (h + h.conj().T) / 2


def hermiticity_defect(h: np.ndarray) -> float:
    """Max-norm of H - H^dag, reported alongside literal spectra."""
    return float(np.max(np.abs(h - h.conj().T)))


def commutator_vi_residual(consts: CircuitConstants, dim: int) -> float:
    """Max deviation between the reference V1 and [phi1, H0]/(i hbar).

    Rows touching the top two Fock levels of either mode are excluded
    (truncation edge).  The residual quantifies the reference operator
    table's deviations from the Hamiltonian it is nominally derived from.
    """
    modes = consts.modes
    ops = two_mode_ops(modes.z1, modes.z2, dim)
    h0 = build_h0(consts, dim)
    v1, _, _, _ = build_vi_operators(consts, dim)
    comm = (ops.phi1 @ h0 - h0 @ ops.phi1) / (1j * hbar)
    safe = np.array([
        flat_index(j1, j2, dim)
        for j1 in range(dim - 2) for j2 in range(dim - 2)
    ])
    delta = (v1 - comm)[np.ix_(safe, safe)]
    scale = max(np.max(np.abs(v1[np.ix_(safe, safe)])), 1e-300)
    return float(np.max(np.abs(delta)) / scale)
