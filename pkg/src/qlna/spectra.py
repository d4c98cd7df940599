"""Oscillator energies and first-order perturbation theory.

Three views of the spectrum are kept side by side: the reference closed-form
energies, the numeric diagonal of the assembled Hamiltonian, and the exact
eigenvalues from dense diagonalization.  They disagree in documented ways
(the closed form carries an occupation-linear imaginary part the matrix
diagonal does not have), so all three are reported rather than reconciled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar
from scipy.linalg import eig

from .constants import CircuitConstants
from .fockspace import flat_index

# Degeneracy guard for perturbation denominators, far below any mode quantum.
DEGENERACY_GUARD_J = 1e-30


class DegenerateLevelError(ValueError):
    """Raised when a perturbation denominator vanishes."""


def literal_energies(j1: int, j2: int, consts: CircuitConstants
                     ) -> tuple[complex, complex]:
    """Closed-form per-oscillator energies (complex)."""
    if j1 < 0 or j2 < 0:
        raise ValueError("occupation numbers must be non-negative")
    rc, modes = consts.recips, consts.modes
    g_m, v_rf = consts.g_m, consts.v_rf
    e1 = hbar * modes.omega1 * (j1 + 0.5) \
        - 1j * hbar / 2 * g_m * rc.r_q1p1 * j1
    e2 = hbar * modes.omega2 * (j2 + 0.5) \
        - 1j * hbar / 2 * g_m * rc.r_q2p2 * j2 \
        - 1j * hbar / 2 * v_rf * rc.r_q2p2 * j2
    return e1, e2


def diagonal_energies(h0: np.ndarray, j1: int, j2: int) -> complex:
    """Diagonal matrix element of the assembled Hamiltonian."""
    dim = int(round(np.sqrt(h0.shape[0])))
    if j1 > dim - 4 or j2 > dim - 4:
        raise IndexError(
            f"state ({j1}, {j2}) too close to the truncation edge for dim {dim}"
        )
    k = flat_index(j1, j2, dim)
    return complex(h0[k, k])


def first_order_energy(hp: np.ndarray, j1: int, j2: int) -> complex:
    """First-order energy correction: the diagonal element of the cubic term.

    Exactly zero by parity for every basis state.
    """
    dim = int(round(np.sqrt(hp.shape[0])))
    k = flat_index(j1, j2, dim)
    return complex(hp[k, k])


@dataclass(frozen=True)
class StateCorrection:
    """First-order state mixing of a two-mode basis state."""

    base: tuple[int, int]
    amplitudes: dict[tuple[int, int], complex]
    norm_correction: float


def first_order_state(j1: int, j2: int, hp: np.ndarray, h0: np.ndarray
                      ) -> StateCorrection:
    """First-order mixing amplitudes <i|Hp|j> / (E_i - E_j).

    Energy denominators use the numeric diagonal of the assembled
    Hamiltonian.  Amplitudes below 1e-30 of the largest matrix element are
    treated as structural zeros.
    """
    dim = int(round(np.sqrt(hp.shape[0])))
    if j1 > dim - 4 or j2 > dim - 4:
        raise IndexError("base state too close to the truncation edge")
    k = flat_index(j1, j2, dim)
    e_base = h0[k, k]
    col = hp[:, k]
    cutoff = np.max(np.abs(hp)) * 1e-30
    amps: dict[tuple[int, int], complex] = {}
    for i in range(dim * dim):
        if i == k or abs(col[i]) <= cutoff:
            continue
        denom = h0[i, i] - e_base
        if abs(denom) < DEGENERACY_GUARD_J:
            raise DegenerateLevelError(
                f"degenerate levels between {(i // dim, i % dim)} and {(j1, j2)}"
            )
        amps[(i // dim, i % dim)] = complex(col[i] / denom)
    norm = float(sum(abs(a) ** 2 for a in amps.values()))
    return StateCorrection(base=(j1, j2), amplitudes=amps, norm_correction=norm)


def _match_by_overlap(v_ref: np.ndarray, v_new: np.ndarray) -> np.ndarray:
    """Index of the new eigenvector with maximal overlap per reference vector."""
    overlap = np.abs(v_new.conj().T @ v_ref)  # [new, ref]
    return np.argmax(overlap, axis=0)


def eigenvalue_shifts(h0: np.ndarray, hp: np.ndarray, lam: float
                      ) -> np.ndarray:
    """Eigenvalue shifts of H0 + lam_eff * Hp, matched by eigenvector overlap.

    ``lam`` is a relative scale: the perturbation is normalized so that
    lam = 1 makes its largest entry comparable to H0's before scaling.
    """
    scale = np.max(np.abs(h0)) / max(np.max(np.abs(hp)), 1e-300)
    w0, v0 = eig(h0)
    w1, v1 = eig(h0 + lam * scale * hp)
    order = _match_by_overlap(v0, v1)
    return w1[order] - w0


@dataclass(frozen=True)
class SpectrumReport:
    """Side-by-side spectrum views for one basis state and its neighborhood."""

    literal: dict[str, complex]
    numeric_diagonal: complex
    exact_eigenvalues: np.ndarray
    nearest_exact: complex
    delta_literal_numeric: float
    delta_numeric_exact: float


def spectrum_report(consts: CircuitConstants, h0: np.ndarray, hp: np.ndarray,
                    j1: int, j2: int) -> SpectrumReport:
    e1, e2 = literal_energies(j1, j2, consts)
    numeric = diagonal_energies(h0, j1, j2)
    w = eig(h0 + hp, right=False)
    w = w[np.argsort(w.real)]
    nearest = w[np.argmin(np.abs(w - numeric))]
    literal_sum = e1 + e2
    return SpectrumReport(
        literal={"E_j1": e1, "E_j2": e2, "E_sum": literal_sum},
        numeric_diagonal=numeric,
        exact_eigenvalues=w,
        nearest_exact=complex(nearest),
        delta_literal_numeric=abs(literal_sum - numeric) / abs(numeric),
        delta_numeric_exact=abs(nearest - numeric) / abs(numeric),
    )
