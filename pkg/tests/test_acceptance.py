"""Acceptance suite: nine end-to-end criteria with stated tolerances.

Each test prints a single PASS/FAIL line with its headline numbers so the
suite doubles as a verification report (run with pytest -s to see them).
"""

import time

import mpmath
import numpy as np
import pytest
from scipy.linalg import expm

from bectomo import runner
from bectomo.dn_tomo import build_design, reconstruct_fock, beta_tradeoff_report
from bectomo.forward import scan_phase, scan_spin
from bectomo.quasiprob import fidelity, wigner_plane
from bectomo.specfun import (
    hermite,
    laguerre_assoc,
    spin_m_values,
    wigner_3j,
    wigner_D,
)
from bectomo.spin_tomo import QuadratureGrid, reconstruct_spin
from bectomo.states import (
    DensityMatrix,
    density_from_vector,
    fock_state,
    squeezed_coefficients,
)

from test_forward import rand_rho
from test_specfun import angular_momentum_ops


def report(ok, label, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    assert ok, f"{label}: {detail}"


def fock_replicates(state, beta, eta, runs, seeds, n_count, k_phases):
    design = build_design(beta, state.n_trunc, n_count, eta)
    out = []
    for seed in seeds:
        scan = scan_phase(state, beta, k_phases, n_count, eta=eta,
                          runs=runs, seed=seed)
        rec, _ = reconstruct_fock(scan, design)
        out.append(rec)
    return out


def test_criterion_1_exact_inversion_spin():
    t0 = time.perf_counter()
    worst = 0.0
    for j in (0.5, 1.0, 1.5, 5.0):
        dim = int(round(2 * j)) + 1
        rho = rand_rho(dim, seed=dim, basis="spin")
        grid = QuadratureGrid.build(j)
        data = scan_spin(rho, grid.settings())
        rec, _ = reconstruct_spin(data, grid)
        worst = max(worst, float(np.max(np.abs(rec.entries - rho.entries))))
    dt = time.perf_counter() - t0
    report(worst < 1e-8 and dt < 60,
           "criterion 1 (exact spin inversion, j up to 5)",
           f"max error {worst:.3e} (< 1e-8), {dt:.1f} s (< 60 s)")


def test_criterion_2_exact_inversion_displaced_number():
    t0 = time.perf_counter()
    n1 = 6
    worst_rho, worst_id = 0.0, 0.0
    for beta in (0.3, 1.1):
        for eta in (1.0, 0.9):
            rho = rand_rho(n1 + 1, seed=int(10 * beta) + int(10 * eta))
            design = build_design(beta, n1, n1 + 5, eta)
            for a, m in zip(design.a, design.m):
                worst_id = max(
                    worst_id,
                    float(np.max(np.abs(m @ a - np.eye(a.shape[1])))),
                )
            scan = scan_phase(rho, beta, 2 * n1 + 3, n1 + 5, eta=eta)
            rec, _ = reconstruct_fock(scan, design)
            worst_rho = max(worst_rho,
                            float(np.max(np.abs(rec.entries - rho.entries))))
    dt = time.perf_counter() - t0
    report(worst_rho < 1e-6 and worst_id < 1e-8 and dt < 30,
           "criterion 2 (exact displaced-number inversion)",
           f"max error {worst_rho:.3e} (< 1e-6), pseudo-inverse identity "
           f"{worst_id:.3e} (< 1e-8), {dt:.1f} s (< 30 s)")


def test_criterion_3_number_state_scenario():
    t0 = time.perf_counter()
    rho = density_from_vector(fock_state(5, 7))
    recs = fock_replicates(rho, beta=0.3, eta=0.9, runs=300000,
                           seeds=range(20), n_count=12, k_phases=17)
    fids = [fidelity(rho, r) for r in recs]
    w0 = np.median(
        [wigner_plane(r, [0.0], [0.0]).values[0, 0] for r in recs]
    )
    n_good = sum(f > 0.95 for f in fids)
    dt = time.perf_counter() - t0
    report(n_good >= 18 and w0 < -0.4 and dt < 300,
           "criterion 3 (number-state reconstruction, 20 seeds)",
           f"fidelity > 0.95 in {n_good}/20, median W(0) {w0:.3f} (< -0.4), "
           f"{dt:.0f} s (< 300 s)")


def test_criterion_4_squeezed_state_scenario():
    t0 = time.perf_counter()
    rho = density_from_vector(squeezed_coefficients(np.sqrt(3), np.e, 10))
    recs = fock_replicates(rho, beta=1.1, eta=0.9, runs=300000,
                           seeds=range(20), n_count=15, k_phases=23)
    fids = [fidelity(rho, r) for r in recs]
    n_good = sum(f > 0.9 for f in fids)
    dt = time.perf_counter() - t0
    report(n_good >= 18 and dt < 300,
           "criterion 4 (squeezed-state reconstruction, 20 seeds)",
           f"fidelity > 0.9 in {n_good}/20 (median {np.median(fids):.4f}), "
           f"{dt:.0f} s (< 300 s)")


def test_criterion_5_spin_scenario_q_grid(tmp_path):
    rep = runner.run(runner.load_config(scenario="fig1"), tmp_path / "noisy")
    from bectomo import io as bio

    g_true = bio.read_quasiprob(tmp_path / "noisy" / "q_sphere_true.csv")
    g_rec = bio.read_quasiprob(tmp_path / "noisy" / "q_sphere_reconstructed.csv")
    err = np.abs(g_rec.values - g_true.values)
    frac_bad = float(np.mean(err > 0.05))
    rep_exact = runner.run(runner.load_config(scenario="fig1"),
                           tmp_path / "exact", exact=True)
    report(frac_bad < 0.01 and rep_exact["max_abs_rho_error"] < 1e-8,
           "criterion 5 (two-mode squeezed spin scenario)",
           f"Q-grid points off by > 0.05: {100 * frac_bad:.2f}% (< 1%), "
           f"exact-data error {rep_exact['max_abs_rho_error']:.2e} (< 1e-8)")


def test_criterion_6_phase_randomization(tmp_path):
    rep = runner.run(runner.load_config(scenario="fig4"), tmp_path / "rand")
    # contrast case: the phase-locked number-state run keeps negative W
    rho5 = density_from_vector(fock_state(5, 7))
    recs = fock_replicates(rho5, beta=0.3, eta=0.9, runs=300000,
                           seeds=[101], n_count=12, k_phases=17)
    w0_fock = wigner_plane(recs[0], [0.0], [0.0]).values[0, 0]
    ok = (rep["offdiag_all_insignificant"]
          and rep["wigner_rec_min"] >= -1e-9
          and w0_fock < -0.1)
    report(ok,
           "criterion 6 (phase randomization kills coherences)",
           f"max off-diagonal significance {rep['offdiag_max_significance']:.2f} "
           f"(< 5), masked W min {rep['wigner_rec_min']:.2e} (>= -1e-9), "
           f"phase-locked number-state W(0) {w0_fock:.3f} (< -0.1)")


def test_criterion_7_displacement_tradeoff():
    rho = density_from_vector(squeezed_coefficients(1.0, 2.0, 6))
    n1 = rho.n_trunc
    records = beta_tradeoff_report(rho, [0.05, 1.1, 1.5], runs=300000,
                                   seeds=list(range(50)))

    def agg(beta, pick):
        vals = [r["std_err"] for r in records if r["beta"] == beta and pick(r)]
        return float(np.mean(vals))

    diag_small = agg(0.05, lambda r: r["row"] == r["col"])
    diag_large = agg(1.5, lambda r: r["row"] == r["col"])
    corner_small = agg(0.05, lambda r: r["col"] - r["row"] == n1)
    corner_mid = agg(1.1, lambda r: r["col"] - r["row"] == n1)
    report(diag_small < diag_large and corner_small > corner_mid,
           "criterion 7 (displacement amplitude tradeoff, 50 seeds)",
           f"diagonal std-err {diag_small:.2e} @ 0.05 < {diag_large:.2e} @ 1.5; "
           f"far-corner std-err {corner_small:.2e} @ 0.05 > {corner_mid:.2e} @ 1.1")


def test_criterion_8_special_function_oracles():
    t0 = time.perf_counter()
    worst = 0.0
    # rotation matrices vs matrix exponentials of the generators
    for j in (0.5, 2, 4.5):
        _, _, jy, jz = angular_momentum_ops(j)
        euler = (0.31, 1.27, 2.05)
        u = (expm(-1j * euler[0] * jz) @ expm(-1j * euler[1] * jy)
             @ expm(-1j * euler[2] * jz))
        worst = max(worst, float(np.max(np.abs(wigner_D(j, euler).entries - u))))
    # polynomial recurrences vs arbitrary precision
    for n, x in [(12, 0.7), (25, -2.3)]:
        worst = max(worst, abs(hermite(n, x) - float(mpmath.hermite(n, x)))
                    / max(1.0, abs(float(mpmath.hermite(n, x)))))
    for n, a, x in [(9, 4, 1.3), (14, 0, 0.2)]:
        worst = max(worst, abs(laguerre_assoc(n, a, x)
                               - float(mpmath.laguerre(n, a, x))))
    # 3j orthogonality
    ortho = 0.0
    for j3 in (0, 1, 2):
        for m3 in spin_m_values(j3):
            total = sum((2 * j3 + 1) * wigner_3j(1, 1, j3, m1, m2, m3) ** 2
                        for m1 in (-1, 0, 1) for m2 in (-1, 0, 1))
            ortho = max(ortho, abs(total - 1.0))
    dt = time.perf_counter() - t0
    report(worst < 1e-10 and ortho < 1e-12 and dt < 30,
           "criterion 8 (special-function oracle suite)",
           f"worst oracle deviation {worst:.2e} (< 1e-10), 3j orthogonality "
           f"{ortho:.2e} (< 1e-12), {dt:.1f} s (< 30 s)")


def test_criterion_9_efficiency_consistency():
    n1 = 6
    rho = rand_rho(n1 + 1, seed=99)
    design = build_design(1.1, n1, n1 + 5, eta=0.9)
    scan = scan_phase(rho, 1.1, 2 * n1 + 3, n1 + 5, eta=0.9)
    rec, _ = reconstruct_fock(scan, design)
    err = float(np.max(np.abs(rec.entries - rho.entries)))
    report(err < 1e-6,
           "criterion 9 (eta = 0.9 data inverted with eta = 0.9 design)",
           f"max error {err:.3e} (< 1e-6)")
