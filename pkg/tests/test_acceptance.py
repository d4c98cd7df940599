"""Acceptance gate: one test per release criterion, each printing a
pass/fail line with the measured figure and its tolerance.

Run with ``pytest -v -s tests/test_acceptance.py`` to see every line; the
assertions carry the same information either way.
"""

import dataclasses
import math
import time

import numpy as np
import pytest
from scipy.constants import hbar

from qlna import constants as qconst
from qlna import response, spectra
from qlna.cli import main as cli_main
from qlna.fockspace import (
    build_h0,
    build_hp,
    build_operator_set,
    flat_index,
)
from qlna.params import default_config_path, derive_device_caps


def _report(tag, title, ok, detail):
    print(f"[ACCEPTANCE {tag}] {title}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def test_01_capacitance_matrix_identity(params):
    """Exact-inverse residual <= 1e-12 on the fixture and 100 random draws."""
    rng = np.random.default_rng(20260825)

    def residual(q):
        caps = derive_device_caps(q)
        nl = qconst.derive_nonlinearity(q)
        cm = qconst.assemble_cap_matrix(caps, q.C_in, q.C_d, nl.C_N)
        inv = qconst.invert_cap_matrix(cm, "consistent")
        minv = np.array([[inv.c11, inv.c12], [inv.c21, inv.c22]])
        return float(np.max(np.abs(cm.m @ minv - np.eye(2))))

    worst = residual(params)
    for _ in range(100):
        q = dataclasses.replace(
            params,
            W=params.W * rng.uniform(0.2, 5.0),
            L_t=params.L_t * rng.uniform(0.2, 5.0),
            t_SiO2=params.t_SiO2 * rng.uniform(0.2, 5.0),
            L_ov=params.L_ov * rng.uniform(0.0, 2.0),
            C_in=params.C_in * rng.uniform(0.2, 5.0),
            C_d=params.C_d * rng.uniform(0.2, 5.0),
        )
        worst = max(worst, residual(q))
    ok = worst <= 1e-12
    assert _report("01", "capacitance-matrix inverse identity", ok,
                   f"max residual {worst:.3e} <= 1e-12, fixture + 100 draws")


def test_02_canonical_commutators(consts):
    """[phi_k, Q_k] = i hbar to 1e-12 hbar at dim 16; [phi_1, Q_2] = 0."""
    dim = 16
    ops = build_operator_set(consts, dim)
    safe = [flat_index(a, b, dim)
            for a in range(dim - 1) for b in range(dim - 1)]
    target = 1j * hbar * np.eye(dim * dim)
    worst = 0.0
    for phi, q in ((ops.phi1, ops.q1), (ops.phi2, ops.q2)):
        comm = phi @ q - q @ phi
        worst = max(worst, float(
            np.max(np.abs((comm - target)[np.ix_(safe, safe)]))))
    cross = float(np.max(np.abs(ops.phi1 @ ops.q2 - ops.q2 @ ops.phi1)))
    ok = worst <= 1e-12 * hbar and cross == 0.0
    assert _report("02", "canonical commutators", ok,
                   f"defect {worst / hbar:.3e} hbar <= 1e-12, cross {cross}")


def test_03_decoupled_spectrum(decoupled_consts):
    """Decoupled eigenvalues are ladder sums, 1e-9 relative, n+m <= 8."""
    start = time.perf_counter()
    dim = 16
    h0 = build_h0(decoupled_consts, dim)
    evals = np.sort(np.linalg.eigvals(h0).real)
    m = decoupled_consts.modes
    worst = 0.0
    for n in range(9):
        for mm in range(9 - n):
            expected = hbar * (m.omega1 * (n + 0.5) + m.omega2 * (mm + 0.5))
            worst = max(worst, float(
                np.min(np.abs(evals - expected)) / expected))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5.0
    assert _report("03", "decoupled spectrum equals ladder sums", ok,
                   f"worst rel error {worst:.3e} <= 1e-9, {elapsed:.2f}s < 5s")


def test_04_perturbation_structure(consts, decoupled_consts):
    """Zero diagonal, selection rule at dim 12, quadratic eigenvalue shifts."""
    dim = 12
    hp_full = build_hp(consts, dim)
    hp_mix = build_hp(consts, dim, even_mode1_only=True)
    diag = max(float(np.max(np.abs(np.diag(hp_full)))),
               float(np.max(np.abs(np.diag(hp_mix)))))

    rule_ok = True
    rows, cols = np.nonzero(hp_mix)
    for r, c in zip(rows, cols):
        if (r // dim - c // dim) not in (0, 2, -2) or \
                (r % dim - c % dim) not in (1, -1, 3, -3):
            rule_ok = False
            break

    h0d = build_h0(decoupled_consts, dim)
    hpd = build_hp(decoupled_consts, dim)
    s1 = spectra.eigenvalue_shifts(h0d, hpd, 1e-4)
    s2 = spectra.eigenvalue_shifts(h0d, hpd, 2e-4)
    idx = np.argmax(np.abs(s1))
    ratio = float(abs(s2[idx]) / abs(s1[idx]))

    ok = diag == 0.0 and rule_ok and 3.5 <= ratio <= 4.5
    assert _report("04", "perturbation diagonal / selection rule / scaling",
                   ok, f"max diag {diag:.1e}, rule {rule_ok} "
                   f"({len(rows)} entries), Richardson ratio {ratio:.3f} "
                   f"in [3.5, 4.5]")


def test_05_state_mixing(params):
    """|0>_2 mixes into {1,3}; |3>_2 into {0,2,4,6} (mode-1-suppressed)."""
    dim = 12
    p = dataclasses.replace(params, g_m=0.0, T_c=0.0, I_s0=0.0, I_d0=0.0)
    c = qconst.derive_constants(p)
    h0 = build_h0(c, dim)
    hp = build_hp(c, dim, even_mode1_only=True)
    set0 = {j2 for _, j2 in spectra.first_order_state(0, 0, hp, h0).amplitudes}
    set3 = {j2 for _, j2 in spectra.first_order_state(0, 3, hp, h0).amplitudes}
    ok = set0 == {1, 3} and set3 == {0, 2, 4, 6}
    assert _report("05", "second-oscillator state mixing", ok,
                   f"|0> -> {sorted(set0)} (want [1, 3]), "
                   f"|3> -> {sorted(set3)} (want [0, 2, 4, 6])")


def test_06_fluctuation_oracle(consts):
    """Consistent closed form agrees with the Fock oracle to 1e-10."""
    dim = 12
    ops = build_operator_set(consts, dim)
    eff = response.effective_elements(consts, "consistent")
    worst = 0.0
    for j1 in range(3):
        for j2 in range(3):
            closed = response.fluctuations(j1, j2, eff, consts.modes)
            oracle = response.fluctuation_oracle(ops, (j1, j2))
            for f in ("dv1sq", "dv2sq", "di1sq", "di2sq"):
                a, b = getattr(closed, f), getattr(oracle, f)
                worst = max(worst, abs(a - b) / abs(b))

    lit = response.effective_elements(consts, "literal")
    fl_l = response.fluctuations(1, 2, lit, consts.modes)
    fl_o = response.fluctuation_oracle(ops, (1, 2))
    lit_delta = max(
        abs(getattr(fl_l, f) - getattr(fl_o, f)) / abs(getattr(fl_o, f))
        for f in ("dv1sq", "dv2sq", "di1sq", "di2sq"))

    ok = worst <= 1e-10
    assert _report("06", "fluctuation closed form vs Fock oracle", ok,
                   f"worst rel delta {worst:.3e} <= 1e-10 on (0..2)^2; "
                   f"literal-mode delta {lit_delta:.3e} (reported only)")


def test_07_vacuum_zero_point(decoupled_consts):
    """Decoupled vacuum voltage variance equals hbar w1 / (2 C_q1)."""
    eff = response.effective_elements(decoupled_consts, "consistent")
    vac = response.fluctuations(0, 0, eff, decoupled_consts.modes)
    m = decoupled_consts.modes
    zp = hbar * m.omega1 / (2 * m.c_q1)
    rel = abs(vac.dv1sq - zp) / zp
    ok = rel <= 1e-12
    assert _report("07", "vacuum zero-point voltage variance", ok,
                   f"rel error {rel:.3e} <= 1e-12")


def test_08_noise_figure_laws(params):
    """nf >= 1 on the default grid; nf -> 1 as g_m -> 0; V_rf = 0 -> dark."""
    pts = response.sweep(params, response.DEFAULT_GRID)
    nf_ok = all(pt.nf >= 1.0 for pt in pts) and \
        all(pt.status == "ok" for pt in pts)

    small = response.evaluate_point(params, params.omega_in, 1e-12)
    limit_ok = abs(small.nf - 1.0) <= 1e-6

    dark = dataclasses.replace(params, V_rf=0.0)
    pt0 = response.evaluate_point(dark, params.omega_in, params.g_m)
    dark_ok = pt0.n1ph == 0.0 and pt0.n2ph == 0.0

    ok = nf_ok and limit_ok and dark_ok
    assert _report("08", "noise-figure laws", ok,
                   f"nf >= 1 on {len(pts)} pts: {nf_ok}; "
                   f"nf(g_m -> 0) - 1 = {small.nf - 1:.2e}; "
                   f"dark photons ({pt0.n1ph}, {pt0.n2ph})")


def test_09_qualitative_sweep_trends(params):
    """Literal-mode sweep: output-mode dominance, NF minimum near the
    mode-frequency sum, NF growth with transconductance, < 10 s runtime."""
    grid = response.DEFAULT_GRID
    start = time.perf_counter()
    pts = response.sweep(params, grid, mode="literal")
    elapsed = time.perf_counter() - start

    n1 = np.array([pt.n1ph for pt in pts]).reshape(grid.win_steps,
                                                   grid.gm_steps)
    n2 = np.array([pt.n2ph for pt in pts]).reshape(n1.shape)
    nf = np.array([pt.nf for pt in pts]).reshape(n1.shape)
    omegas = grid.omega_values()

    frac = float(np.mean(n2 > n1))
    dominance = _report("09a", "second-oscillator photon dominance",
                        frac >= 0.90, f"n2ph > n1ph on {100 * frac:.1f}% "
                        f">= 90% of the grid")

    modes = response.frame_constants(params, mode="literal").modes
    target = int(np.argmin(np.abs(omegas - (modes.omega1 + modes.omega2))))
    profile = nf.mean(axis=1)
    local_mins = [i for i in range(1, len(profile) - 1)
                  if profile[i] < profile[i - 1]
                  and profile[i] < profile[i + 1]]
    near = [i for i in local_mins if abs(i - target) <= 3]
    dip = _report("09b", "nf local minimum near mode-frequency sum",
                  bool(near), f"local minima at steps {local_mins}, "
                  f"sum frequency at step {target} (+-3)")

    mean_nf = nf.mean(axis=0)
    growing = bool(np.all(np.diff(mean_nf) > 0))
    growth = _report("09c", "mean nf increases with transconductance",
                     growing, f"grid-mean nf spans "
                     f"{mean_nf[0]:.3f} -> {mean_nf[-1]:.3f}, "
                     f"monotone: {growing}")

    timing = _report("09d", "full sweep runtime", elapsed < 10.0,
                     f"{elapsed:.2f}s < 10s for "
                     f"{grid.win_steps * grid.gm_steps} points")

    assert dominance and dip and growth and timing


def test_10_sweep_determinism(tmp_path):
    """Identical sweep invocations produce byte-identical CSVs."""
    cfg = str(default_config_path())
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep-nf", "--config", cfg, "--threads", "4"]
    assert cli_main([*args, "--out", str(a)]) == 0
    assert cli_main([*args, "--out", str(b)]) == 0
    identical = a.read_bytes() == b.read_bytes()
    assert _report("10", "sweep determinism", identical,
                   f"two full-grid CSVs byte-identical: {identical}")
