"""Derived circuit-quantization constants.

Everything between the raw capacitances and the two-oscillator Hamiltonian:
the node capacitance matrix, its inverse, the reciprocal capacitance
shorthands, the drive constants, the oscillator mode parameters and the
steady-state coupling/drive coefficients.

Two evaluation modes exist for the matrix inverse.  "consistent" is the
exact 2x2 inverse of the capacitance matrix (M @ M^-1 == I holds to machine
precision).  "literal" reproduces the reference closed-form entries, whose
determinant expression swaps C_gs for C_d; the discrepancy between the two
is surfaced by :func:`mode_delta_report`, never silently discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .params import (
    CircuitParams,
    DeviceCaps,
    Nonlinearity,
    bias_noise_currents,
    derive_device_caps,
    derive_nonlinearity,
)

MODES = ("literal", "consistent")


class DerivationError(ValueError):
    """Raised when a derived constant is undefined for the given inputs."""


@dataclass(frozen=True)
class CapMatrix:
    """2x2 node capacitance matrix plus the ingredient capacitances."""

    m: np.ndarray
    c_in: float
    c_d: float
    c_gs: float
    c_gd: float
    c_n: float

    @property
    def s1(self) -> float:
        """C_in + C_gs + C_gd, the first-node coefficient sum."""
        return self.c_in + self.c_gs + self.c_gd

    @property
    def s2(self) -> float:
        """C_d + C_gd, the second-node coefficient sum."""
        return self.c_d + self.c_gd


@dataclass(frozen=True)
class InverseCapMatrix:
    c11: float
    c12: float
    c21: float
    c22: float
    det_c: float
    mode: str


@dataclass(frozen=True)
class ReciprocalCaps:
    """Reciprocal-doubled constants r_X = 1 / (2 C_X), units 1/F.

    Stored in reciprocal form because several C_X are negative or infinite
    for physical inputs.
    """

    r_q1: float
    r_q2: float
    r_q1q2: float
    r_p1: float
    r_p2: float
    r_q1p1: float
    r_q2p2: float
    r_q1p2: float
    r_p1p2: float
    r_q2p1: float
    rp_p1p2: float
    rp_q1p2: float
    rp_q2p2: float


@dataclass(frozen=True)
class DriveConsts:
    """Dimensionless drive constants.

    The bias-current corrections to P1/P2 divide by g_m * V_rf; the products
    ``p1_gmvrf = P1 * g_m * V_rf`` and ``p2_gmvrf`` are stored directly since
    they are what every consumer needs and they stay finite in the undriven
    limit.  Accessing ``p1``/``p2`` themselves with g_m * V_rf == 0 and a
    nonzero bias current raises.
    """

    p11: float
    p12: float
    p21: float
    p22: float
    q11: float
    q12: float
    q13: float
    q21: float
    q22: float
    q23: float
    g1: float
    g2: float
    p1_gmvrf: float
    p2_gmvrf: float
    gmvrf: float
    i_s_bar: float
    i_d_bar: float

    def _ratio(self, base: float, i_bar: float, name: str) -> float:
        if self.gmvrf != 0.0:
            return base - i_bar / self.gmvrf
        if i_bar == 0.0:
            return base
        raise DerivationError(
            f"{name} is undefined: g_m * V_rf = 0 while the bias current "
            f"term {i_bar!r} A is nonzero"
        )

    @property
    def p1(self) -> float:
        return self._ratio(self.p11 + self.p12, self.i_s_bar, "P1")

    @property
    def p2(self) -> float:
        return self._ratio(self.p21 + self.p22, self.i_d_bar, "P2")


@dataclass(frozen=True)
class ModePair:
    """Oscillator frequencies, impedances and effective reactive elements."""

    omega1: float
    omega2: float
    z1: float
    z2: float
    l_g_eff: float
    l_d_eff: float
    c_q1: float
    c_q2: float


@dataclass(frozen=True)
class SteadyStateCoefficients:
    """Complex coupling / self / drive coefficients of the driven system.

    ``e1w`` / ``e2w`` are the full drive amplitudes including the
    bias-noise-current offsets; ``e1w_coherent`` / ``e2w_coherent`` keep only
    the terms proportional to the source amplitude.  The mean-field steady
    state is forced by the coherent parts — the noise currents have zero
    mean and contribute to the variances (via the noise-figure prefactor),
    not to the coherent amplitudes.
    """

    a1: complex
    a2: complex
    a3: complex
    b1: complex
    b2: complex
    b3: complex
    e1w: complex
    e2w: complex
    e1w_coherent: complex
    e2w_coherent: complex


@dataclass(frozen=True)
class CircuitConstants:
    """Aggregate of every derived constant for one parameter point."""

    params: CircuitParams
    caps: DeviceCaps
    nonlinearity: Nonlinearity
    cap_matrix: CapMatrix
    inverse: InverseCapMatrix
    recips: ReciprocalCaps
    drive: DriveConsts
    modes: ModePair
    coeffs: SteadyStateCoefficients
    mode: str
    g_m: float
    v_rf: float

    def __post_init__(self):
        for name, value in iter_named_constants(self):
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise DerivationError(f"derived constant {name} is not finite")


def assemble_cap_matrix(caps: DeviceCaps, c_in: float, c_d: float,
                        c_n: float) -> CapMatrix:
    """Node capacitance matrix relating charge rates to flux rates."""
    m = np.array(
        [[c_in + caps.C_gd + caps.C_gs + c_n, -caps.C_gd],
         [-caps.C_gd, c_d + caps.C_gd]]
    )
    eigvals = np.linalg.eigvalsh(m)
    if np.any(eigvals <= 0):
        raise DerivationError(
            f"capacitance matrix is not positive definite (eigenvalues {eigvals})"
        )
    return CapMatrix(m=m, c_in=c_in, c_d=c_d, c_gs=caps.C_gs,
                     c_gd=caps.C_gd, c_n=c_n)


def invert_cap_matrix(cm: CapMatrix, mode: str = "consistent") -> InverseCapMatrix:
    """Invert the capacitance matrix in the requested evaluation mode."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "consistent":
        det = cm.m[0, 0] * cm.m[1, 1] - cm.m[0, 1] * cm.m[1, 0]
        if det <= 0:
            raise DerivationError("capacitance matrix is singular")
        return InverseCapMatrix(
            c11=cm.m[1, 1] / det,
            c12=cm.c_gd / det,
            c21=cm.c_gd / det,
            c22=cm.m[0, 0] / det,
            det_c=det,
            mode=mode,
        )
    # Literal mode: reference closed-form entries, with the determinant
    # built from (C_in + C_N + C_d + C_gd) instead of the exact row sum.
    c_sum = cm.c_in + cm.c_n + cm.c_d + cm.c_gd
    det = c_sum * (cm.c_d + cm.c_gd) - cm.c_gd ** 2
    if det <= 0:
        raise DerivationError("capacitance matrix is singular in literal mode")
    return InverseCapMatrix(
        c11=(cm.c_d + cm.c_gd) / det,
        c12=cm.c_gd / det,
        c21=cm.c_gd / det,
        c22=c_sum / det,
        det_c=det,
        mode=mode,
    )


def reciprocal_constants(inv: InverseCapMatrix, cm: CapMatrix) -> ReciprocalCaps:
    """All thirteen reciprocal-doubled constants, term by term."""
    c11, c12, c21, c22 = inv.c11, inv.c12, inv.c21, inv.c22
    s1, s2, c_gd, c_in = cm.s1, cm.s2, cm.c_gd, cm.c_in
    return ReciprocalCaps(
        r_q1=c11 ** 2 * s1 / 2 + c21 ** 2 * s2 / 2 - c_gd * c21 * c11,
        r_q2=c12 ** 2 * s1 / 2 + c22 ** 2 * s2 / 2 - c_gd * c12 * c22,
        r_q1q2=c12 * c11 * s1 + c22 * c21 * s2 - c_gd * (c11 * c22 + c21 * c12),
        r_p1=c11 ** 2 * s1 / 2,
        r_p2=c22 ** 2 * s2 / 2,
        r_q1p1=c11 ** 2 * s1 + c_gd * c21 * c11,
        r_q2p2=-c22 * c21 * s2 + c_gd * c22 * c21,
        r_q1p2=-c21 ** 2 * s2 + c_gd * c11 * c12,
        r_p1p2=-c_gd * c11 * c12,
        r_q2p1=c11 * c12 * s1 + c_gd * c22 * c11,
        # The two primed constants below are defined with identical
        # right-hand sides; kept literal (see mode_delta_report).
        rp_p1p2=-2 * c11 ** 2 * c_in,
        rp_q1p2=-2 * c11 ** 2 * c_in,
        rp_q2p2=-2 * c11 * c12 * c_in,
    )


def drive_constants(inv: InverseCapMatrix, cm: CapMatrix, g_m: float,
                    v_rf: float, i_s_bar: float, i_d_bar: float) -> DriveConsts:
    """Dimensionless drive constants P/q/G."""
    c11, c12, c21, c22 = inv.c11, inv.c12, inv.c21, inv.c22
    s1, s2, c_gd, c_in = cm.s1, cm.s2, cm.c_gd, cm.c_in
    p11 = -2 * c11 ** 2 * c_in * s1
    p12 = 2 * c_gd * c21 * c11 * c_in
    p21 = -2 * c21 ** 2 * c_in * s2
    p22 = 2 * c_gd * c21 * c11 * c_in
    q11 = -2 * c11 ** 2 * c_in * s1
    q21 = -2 * c11 * c12 * c_in * s1
    q12 = 2 * c21 ** 2 * c_in * s2
    q22 = 2 * c21 * c22 * c_in * s2
    q13 = -2 * c_gd * c21 * c11 * c_in
    q23 = -2 * c_gd * c22 * c11 * c_in
    gmvrf = g_m * v_rf
    return DriveConsts(
        p11=p11, p12=p12, p21=p21, p22=p22,
        q11=q11, q12=q12, q13=q13, q21=q21, q22=q22, q23=q23,
        g1=q11 + q12 + q13,
        g2=q21 + q22 + q23,
        p1_gmvrf=(p11 + p12) * gmvrf - i_s_bar,
        p2_gmvrf=(p21 + p22) * gmvrf - i_d_bar,
        gmvrf=gmvrf,
        i_s_bar=i_s_bar,
        i_d_bar=i_d_bar,
    )


def mode_parameters(rc: ReciprocalCaps, l_g: float, l_d: float,
                    g_m: float) -> ModePair:
    """Oscillator frequencies and impedances from the effective elements.

    The transconductance stiffens both inductors:
    1/L_eff = 1/L + 2 g_m^2 r_p.
    """
    if rc.r_q1 <= 0 or rc.r_q2 <= 0:
        raise DerivationError("mode capacitance constants must be positive")
    inv_lg = 1.0 / l_g + 2.0 * g_m ** 2 * rc.r_p1
    inv_ld = 1.0 / l_d + 2.0 * g_m ** 2 * rc.r_p2
    if inv_lg <= 0 or inv_ld <= 0:
        raise DerivationError("effective inductance is not positive")
    l_g_eff, l_d_eff = 1.0 / inv_lg, 1.0 / inv_ld
    c_q1, c_q2 = 1.0 / (2.0 * rc.r_q1), 1.0 / (2.0 * rc.r_q2)
    return ModePair(
        omega1=1.0 / math.sqrt(l_g_eff * c_q1),
        omega2=1.0 / math.sqrt(l_d_eff * c_q2),
        z1=math.sqrt(l_g_eff / c_q1),
        z2=math.sqrt(l_d_eff / c_q2),
        l_g_eff=l_g_eff,
        l_d_eff=l_d_eff,
        c_q1=c_q1,
        c_q2=c_q2,
    )


def steady_coefficients(rc: ReciprocalCaps, modes: ModePair,
                        inv: InverseCapMatrix, cm: CapMatrix,
                        g_m: float, g_nl: float, v_rf: float,
                        drive: DriveConsts) -> SteadyStateCoefficients:
    """Complex coupling and drive coefficients of the driven two-mode system."""
    z1, z2 = modes.z1, modes.z2
    w1, w2 = modes.omega1, modes.omega2
    sz12 = math.sqrt(z1 * z2)
    sz2z1 = math.sqrt(z2 / z1)

    a1 = (-1j * rc.r_q1q2 / (2 * sz12) - g_m * rc.r_q2p1 / 2) / w2
    a3 = (g_m * rc.r_q1p1 / 2) / w1
    a2 = (
        -1j * g_m ** 2 * rc.r_p1p2 * sz12 / 2
        + g_m * rc.r_q1p2 * sz2z1 / 2
        - 1j * g_m * g_nl * v_rf * rc.rp_p1p2 * sz12 / 2
        + g_nl * v_rf * rc.rp_q1p2 * sz2z1 / 2
    ) / w2
    b1 = (
        -1j * rc.r_q1q2 / (2 * sz12)
        - g_m * rc.r_q1p2 * sz2z1 / 2
        - g_nl * v_rf * rc.rp_q1p2 * sz2z1 / 2
    ) / w1
    b3 = (g_m * rc.r_q2p2 / 2 + g_nl * v_rf * rc.rp_q2p2 / 2) / w2
    b2 = (
        -1j * g_m ** 2 * rc.r_p1p2 * sz12 / 2
        + g_m * rc.r_q2p1 / 2
        - 1j * g_m * g_nl * v_rf * rc.rp_p1p2 * sz12 / 2
    ) / w1
    s1, s2 = math.sqrt(z1 / (2 * hbar)), math.sqrt(z2 / (2 * hbar))
    e1w_coh = (
        drive.g1 * v_rf / 2 * math.sqrt(1.0 / (2 * z1 * hbar))
        - 1j * (drive.p11 + drive.p12) * drive.gmvrf / 2 * s1
    )
    e2w_coh = (
        drive.g2 * v_rf / 2 * math.sqrt(1.0 / (2 * z2 * hbar))
        - 1j * (drive.p21 + drive.p22) * drive.gmvrf / 2 * s2
        - 1j * inv.c11 ** 2 * cm.c_in ** 2 * g_nl * v_rf ** 2 * s2
    )
    e1w = e1w_coh + 1j * drive.i_s_bar / 2 * s1
    e2w = e2w_coh + 1j * drive.i_d_bar / 2 * s2
    return SteadyStateCoefficients(a1=a1, a2=a2, a3=a3, b1=b1, b2=b2, b3=b3,
                                   e1w=e1w, e2w=e2w,
                                   e1w_coherent=e1w_coh, e2w_coherent=e2w_coh)


def derive_constants(p: CircuitParams, mode: str = "consistent",
                     g_m: float | None = None,
                     v_rf: float | None = None) -> CircuitConstants:
    """Full derivation chain for one parameter point.

    ``g_m`` / ``v_rf`` override the configured values (sweep axes).
    """
    g_m = p.g_m if g_m is None else g_m
    v_rf = p.V_rf if v_rf is None else v_rf
    caps = derive_device_caps(p)
    nl = derive_nonlinearity(p)
    i_s_bar, i_d_bar = bias_noise_currents(p)
    cm = assemble_cap_matrix(caps, p.C_in, p.C_d, nl.C_N)
    inv = invert_cap_matrix(cm, mode)
    rc = reciprocal_constants(inv, cm)
    drive = drive_constants(inv, cm, g_m, v_rf, i_s_bar, i_d_bar)
    modes = mode_parameters(rc, p.L_g, p.L_d, g_m)
    coeffs = steady_coefficients(rc, modes, inv, cm, g_m, nl.g_NL, v_rf, drive)
    return CircuitConstants(
        params=p, caps=caps, nonlinearity=nl, cap_matrix=cm, inverse=inv,
        recips=rc, drive=drive, modes=modes, coeffs=coeffs, mode=mode,
        g_m=g_m, v_rf=v_rf,
    )


def mode_delta_report(p: CircuitParams) -> dict[str, float]:
    """Relative literal-vs-consistent deltas of the inverse-matrix entries."""
    caps = derive_device_caps(p)
    nl = derive_nonlinearity(p)
    cm = assemble_cap_matrix(caps, p.C_in, p.C_d, nl.C_N)
    lit = invert_cap_matrix(cm, "literal")
    con = invert_cap_matrix(cm, "consistent")

    def rel(a: float, b: float) -> float:
        return abs(a - b) / abs(b) if b != 0 else abs(a - b)

    return {
        "c11": rel(lit.c11, con.c11),
        "c12": rel(lit.c12, con.c12),
        "c22": rel(lit.c22, con.c22),
        "det_c": rel(lit.det_c, con.det_c),
    }


# (name, units, accessor) table for the constants report.
_CONSTANT_FIELDS = [
    ("C_gs", "F", lambda c: c.caps.C_gs),
    ("C_gd", "F", lambda c: c.caps.C_gd),
    ("C_ox_area", "F/m^2", lambda c: c.caps.C_ox_area),
    ("g_m3L", "A/V^2", lambda c: c.nonlinearity.g_m3L),
    ("g_NL", "A/V^2", lambda c: c.nonlinearity.g_NL),
    ("C_N", "F", lambda c: c.nonlinearity.C_N),
    ("I_s_bar", "A", lambda c: c.drive.i_s_bar),
    ("I_d_bar", "A", lambda c: c.drive.i_d_bar),
    ("C11", "1/F", lambda c: c.inverse.c11),
    ("C12", "1/F", lambda c: c.inverse.c12),
    ("C21", "1/F", lambda c: c.inverse.c21),
    ("C22", "1/F", lambda c: c.inverse.c22),
    ("det_C", "F^2", lambda c: c.inverse.det_c),
    ("r_Cq1", "1/F", lambda c: c.recips.r_q1),
    ("r_Cq2", "1/F", lambda c: c.recips.r_q2),
    ("r_Cq1q2", "1/F", lambda c: c.recips.r_q1q2),
    ("r_Cp1", "1/F", lambda c: c.recips.r_p1),
    ("r_Cp2", "1/F", lambda c: c.recips.r_p2),
    ("r_Cq1p1", "1/F", lambda c: c.recips.r_q1p1),
    ("r_Cq2p2", "1/F", lambda c: c.recips.r_q2p2),
    ("r_Cq1p2", "1/F", lambda c: c.recips.r_q1p2),
    ("r_Cp1p2", "1/F", lambda c: c.recips.r_p1p2),
    ("r_Cq2p1", "1/F", lambda c: c.recips.r_q2p1),
    ("r_Cp1p2_prime", "1/F", lambda c: c.recips.rp_p1p2),
    ("r_Cq1p2_prime", "1/F", lambda c: c.recips.rp_q1p2),
    ("r_Cq2p2_prime", "1/F", lambda c: c.recips.rp_q2p2),
    ("P11", "1", lambda c: c.drive.p11),
    ("P12", "1", lambda c: c.drive.p12),
    ("P21", "1", lambda c: c.drive.p21),
    ("P22", "1", lambda c: c.drive.p22),
    ("q11", "1", lambda c: c.drive.q11),
    ("q12", "1", lambda c: c.drive.q12),
    ("q13", "1", lambda c: c.drive.q13),
    ("q21", "1", lambda c: c.drive.q21),
    ("q22", "1", lambda c: c.drive.q22),
    ("q23", "1", lambda c: c.drive.q23),
    ("G1", "1", lambda c: c.drive.g1),
    ("G2", "1", lambda c: c.drive.g2),
    ("P1*gm*Vrf", "A", lambda c: c.drive.p1_gmvrf),
    ("P2*gm*Vrf", "A", lambda c: c.drive.p2_gmvrf),
    ("omega1", "rad/s", lambda c: c.modes.omega1),
    ("omega2", "rad/s", lambda c: c.modes.omega2),
    ("Z1", "Ohm", lambda c: c.modes.z1),
    ("Z2", "Ohm", lambda c: c.modes.z2),
    ("L_g_eff", "H", lambda c: c.modes.l_g_eff),
    ("L_d_eff", "H", lambda c: c.modes.l_d_eff),
    ("C_q1", "F", lambda c: c.modes.c_q1),
    ("C_q2", "F", lambda c: c.modes.c_q2),
    ("A1", "1", lambda c: c.coeffs.a1),
    ("A2", "1", lambda c: c.coeffs.a2),
    ("A3", "1", lambda c: c.coeffs.a3),
    ("B1", "1", lambda c: c.coeffs.b1),
    ("B2", "1", lambda c: c.coeffs.b2),
    ("B3", "1", lambda c: c.coeffs.b3),
    ("E1w", "sqrt(1/s)", lambda c: c.coeffs.e1w),
    ("E2w", "sqrt(1/s)", lambda c: c.coeffs.e2w),
]


def iter_named_constants(consts: CircuitConstants):
    """Yield (name, complex value) for every derived constant."""
    for name, _units, get in _CONSTANT_FIELDS:
        yield name, complex(get(consts))


def constant_rows(consts: CircuitConstants):
    """Yield (name, value_re, value_im, units, mode) report rows."""
    for name, units, get in _CONSTANT_FIELDS:
        value = complex(get(consts))
        yield name, value.real, value.imag, units, consts.mode
