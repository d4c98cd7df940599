"""Invariant suite behind ``qlna validate``.

Each check returns (name, status, detail) where status is True/False for
pass/fail or None for informational rows (reported deltas without a
threshold).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.constants import hbar

from . import constants, fockspace, response, spectra
from .params import CircuitParams, derive_device_caps

Check = tuple[str, bool | None, str]


def decoupled_params(p: CircuitParams) -> CircuitParams:
    """Decoupled-limit variant: no transconductance, drive, overlap or noise."""
    return dataclasses.replace(
        p, g_m=0.0, V_rf=0.0, L_ov=0.0, T_c=0.0, I_s0=0.0, I_d0=0.0,
    )


def run_invariants(p: CircuitParams, mode: str = "consistent") -> list[Check]:
    checks: list[Check] = []
    rng = np.random.default_rng(20260825)

    # --- capacitance matrix ---------------------------------------------
    def inverse_residual(q: CircuitParams) -> float:
        caps = derive_device_caps(q)
        nl = constants.derive_nonlinearity(q)
        cm = constants.assemble_cap_matrix(caps, q.C_in, q.C_d, nl.C_N)
        inv = constants.invert_cap_matrix(cm, "consistent")
        minv = np.array([[inv.c11, inv.c12], [inv.c21, inv.c22]])
        return float(np.max(np.abs(cm.m @ minv - np.eye(2))))

    worst = inverse_residual(p)
    for _ in range(100):
        q = dataclasses.replace(
            p,
            W=p.W * rng.uniform(0.2, 5.0),
            L_t=p.L_t * rng.uniform(0.2, 5.0),
            t_SiO2=p.t_SiO2 * rng.uniform(0.2, 5.0),
            L_ov=p.L_ov * rng.uniform(0.0, 2.0),
            C_in=p.C_in * rng.uniform(0.2, 5.0),
            C_d=p.C_d * rng.uniform(0.2, 5.0),
        )
        worst = max(worst, inverse_residual(q))
    checks.append(("cap-matrix inverse identity (fixture + 100 draws)",
                   worst <= 1e-12, f"max scaled residual {worst:.3e}"))

    consts = constants.derive_constants(p, mode=mode)
    lit = constants.invert_cap_matrix(consts.cap_matrix, "literal")
    checks.append(("inverse symmetry C12 == C21",
                   lit.c12 == lit.c21 and consts.inverse.c12 == consts.inverse.c21,
                   "exact in both modes"))
    deltas = constants.mode_delta_report(p)
    checks.append(("literal vs consistent inverse delta", None,
                   ", ".join(f"{k}: {v:.3e}" for k, v in deltas.items())))

    # --- canonical commutators ------------------------------------------
    dim = 16
    ops = fockspace.build_operator_set(consts, dim)
    safe = [fockspace.flat_index(a, b, dim)
            for a in range(dim - 1) for b in range(dim - 1)]
    comm1 = ops.phi1 @ ops.q1 - ops.q1 @ ops.phi1
    comm2 = ops.phi2 @ ops.q2 - ops.q2 @ ops.phi2
    target = 1j * hbar * np.eye(dim * dim)
    d1 = np.max(np.abs((comm1 - target)[np.ix_(safe, safe)]))
    d2 = np.max(np.abs((comm2 - target)[np.ix_(safe, safe)]))
    checks.append(("canonical commutators [phi_k, Q_k] = i hbar",
                   max(d1, d2) <= 1e-12 * hbar,
                   f"defects {d1 / hbar:.3e}, {d2 / hbar:.3e} (units hbar)"))
    cross = np.max(np.abs(ops.phi1 @ ops.q2 - ops.q2 @ ops.phi1))
    checks.append(("cross commutator [phi_1, Q_2] = 0", cross == 0.0,
                   f"max entry {cross:.3e}"))

    # --- decoupled spectrum ---------------------------------------------
    pd = decoupled_params(p)
    cd = constants.derive_constants(pd, mode=mode)
    h0d = fockspace.build_h0(cd, dim)
    evals = np.sort(np.linalg.eigvals(h0d).real)
    worst_rel = 0.0
    w1, w2 = cd.modes.omega1, cd.modes.omega2
    for n in range(9):
        for m_ in range(9 - n):
            expected = hbar * (w1 * (n + 0.5) + w2 * (m_ + 0.5))
            rel = np.min(np.abs(evals - expected)) / expected
            worst_rel = max(worst_rel, rel)
    checks.append(("decoupled spectrum = ladder sums (n+m <= 8)",
                   worst_rel <= 1e-9, f"worst relative error {worst_rel:.3e}"))

    # --- perturbation structure -----------------------------------------
    dim12 = 12
    hp_full = fockspace.build_hp(consts, dim12)
    hp_mix = fockspace.build_hp(consts, dim12, even_mode1_only=True)
    diag_max = max(np.max(np.abs(np.diag(hp_full))),
                   np.max(np.abs(np.diag(hp_mix))))
    checks.append(("perturbation diagonal exactly zero", diag_max == 0.0,
                   f"max diagonal {diag_max:.3e}"))

    ok = True
    rows, cols = np.nonzero(hp_mix)
    for r, c in zip(rows, cols):
        dj1 = r // dim12 - c // dim12
        dj2 = r % dim12 - c % dim12
        if dj1 not in (0, 2, -2) or dj2 not in (1, -1, 3, -3):
            ok = False
            break
    checks.append(("selection rule dj1 in {0,+-2}, dj2 in {+-1,+-3}", ok,
                   f"{len(rows)} nonzero entries audited at dim {dim12}"))

    h0d12 = fockspace.build_h0(cd, dim12)
    hpd12 = fockspace.build_hp(cd, dim12)
    s1 = spectra.eigenvalue_shifts(h0d12, hpd12, 1e-4)
    s2 = spectra.eigenvalue_shifts(h0d12, hpd12, 2e-4)
    idx = np.argmax(np.abs(s1))
    ratio = abs(s2[idx]) / abs(s1[idx])
    checks.append(("eigenvalue shifts quadratic in perturbation scale",
                   3.5 <= ratio <= 4.5, f"Richardson ratio {ratio:.3f}"))

    mix_p = dataclasses.replace(p, g_m=0.0, T_c=0.0, I_s0=0.0, I_d0=0.0)
    cm_mix = constants.derive_constants(mix_p, mode=mode)
    hp_m = fockspace.build_hp(cm_mix, dim12, even_mode1_only=True)
    h0_m = fockspace.build_h0(cm_mix, dim12)
    sc0 = spectra.first_order_state(0, 0, hp_m, h0_m)
    sc3 = spectra.first_order_state(0, 3, hp_m, h0_m)
    set0 = {j2 for (_, j2) in sc0.amplitudes}
    set3 = {j2 for (_, j2) in sc3.amplitudes}
    checks.append(("state mixing |0> -> {1,3} and |3> -> {0,2,4,6}",
                   set0 == {1, 3} and set3 == {0, 2, 4, 6},
                   f"got {sorted(set0)} and {sorted(set3)}"))

    defect = fockspace.hermiticity_defect(fockspace.build_h0(consts, dim12))
    checks.append(("hermiticity defect of H0 (reported)", None,
                   f"max |H0 - H0^dag| = {defect:.3e} J"))
    vi_res = fockspace.commutator_vi_residual(consts, dim12)
    checks.append(("reference V1 vs commutator [phi1,H0]/i hbar (reported)", None,
                   f"relative residual {vi_res:.3e}"))

    # --- fluctuations ----------------------------------------------------
    cc = constants.derive_constants(p, mode="consistent")
    opsc = fockspace.build_operator_set(cc, dim12)
    effc = response.effective_elements(cc, "consistent")
    worst_fl = 0.0
    for j1 in range(3):
        for j2 in range(3):
            closed = response.fluctuations(j1, j2, effc, cc.modes)
            oracle = response.fluctuation_oracle(opsc, (j1, j2))
            for f in dataclasses.fields(closed):
                a = getattr(closed, f.name)
                b = getattr(oracle, f.name)
                worst_fl = max(worst_fl, abs(a - b) / abs(b))
    checks.append(("closed-form variances match Fock oracle (consistent)",
                   worst_fl <= 1e-10, f"worst relative delta {worst_fl:.3e}"))

    effl = response.effective_elements(cc, "literal")
    fl_l = response.fluctuations(1, 2, effl, cc.modes)
    fl_o = response.fluctuation_oracle(opsc, (1, 2))
    lit_delta = max(
        abs(getattr(fl_l, f.name) - getattr(fl_o, f.name))
        / abs(getattr(fl_o, f.name))
        for f in dataclasses.fields(fl_l)
    )
    checks.append(("literal-mode variance delta vs oracle (reported)", None,
                   f"worst relative delta {lit_delta:.3e}"))

    eff_d = response.effective_elements(cd, "consistent")
    vac = response.fluctuations(0, 0, eff_d, cd.modes)
    zp = hbar * cd.modes.omega1 / (2 * cd.modes.c_q1)
    rel = abs(vac.dv1sq - zp) / zp
    checks.append(("vacuum zero-point voltage variance", rel <= 1e-12,
                   f"relative error {rel:.3e}"))

    # --- driven response -------------------------------------------------
    k1, k2 = response.resolve_kappas(p, consts.modes)
    ss = response.steady_state(consts.coeffs, consts.modes, k1, k2,
                               p.omega_in)
    checks.append(("steady-state solve residual", ss.residual <= 1e-12,
                   f"relative residual {ss.residual:.3e}"))

    p0 = dataclasses.replace(p, V_rf=0.0)
    c0 = constants.derive_constants(p0, mode=mode)
    ss0 = response.steady_state(c0.coeffs, c0.modes, k1, k2, p.omega_in)
    checks.append(("zero drive gives zero photons",
                   ss0.n1ph == 0.0 and ss0.n2ph == 0.0,
                   f"n1ph {ss0.n1ph}, n2ph {ss0.n2ph}"))

    pl = dataclasses.replace(decoupled_params(p), V_rf=p.V_rf or 3e-4)
    cl = constants.derive_constants(pl, mode=mode)
    kl1, _ = response.resolve_kappas(pl, cl.modes)
    w_grid = cl.modes.omega1 * np.linspace(0.9, 1.1, 4001)
    n1 = np.array([
        response.steady_state(cl.coeffs, cl.modes, kl1, kl1, w).n1ph
        for w in w_grid
    ])
    peak = w_grid[np.argmax(n1)]
    half = n1 >= np.max(n1) / 2
    fwhm = w_grid[half][-1] - w_grid[half][0]
    peak_ok = abs(peak - cl.modes.omega1) <= (w_grid[1] - w_grid[0])
    width_ok = abs(fwhm - kl1) / kl1 <= 0.10
    checks.append(("decoupled response is a Lorentzian at omega_1",
                   peak_ok and width_ok,
                   f"peak offset {peak - cl.modes.omega1:.3e} rad/s, "
                   f"FWHM/kappa = {fwhm / kl1:.3f}"))

    # --- qualitative sweep trends (reported) -----------------------------
    pts = response.sweep(p, response.DEFAULT_GRID, mode="literal")
    nf = np.array([pt.nf for pt in pts]).reshape(
        response.DEFAULT_GRID.win_steps, response.DEFAULT_GRID.gm_steps)
    n_frac = np.mean([pt.n2ph > pt.n1ph for pt in pts])
    mean_nf = nf.mean(axis=0)
    checks.append(("sweep trends: output-mode photon dominance / NF vs g_m",
                   None,
                   f"n2ph > n1ph on {100 * n_frac:.1f}% of the grid; "
                   f"grid-mean nf increasing in g_m: "
                   f"{bool(np.all(np.diff(mean_nf) > 0))}"))

    # --- truncation convergence -----------------------------------------
    vals = []
    for d in (12, 16, 20):
        o = fockspace.build_operator_set(cc, d)
        fl = response.fluctuation_oracle(o, (2, 2))
        vals.append((spectra.diagonal_energies(o.h0, 2, 2), fl.dv1sq))
    conv = max(
        abs(vals[i + 1][j] - vals[i][j]) / abs(vals[i][j])
        for i in range(2) for j in range(2)
    )
    checks.append(("truncation convergence dim 12 -> 16 -> 20",
                   conv <= 1e-6, f"worst relative change {conv:.3e}"))

    return checks
