"""Case II reconstruction: Fourier analysis of phase-scanned
displaced-number data and per-order pseudo-inverse of the Laguerre design
matrices.

For each Fourier order s the design matrix A^(s) maps the s-th diagonal
band of the density matrix to the order-s phase coefficients of the count
distribution; its pseudo-inverse recovers the band.  Detector
inefficiency enters as a left multiplication of A by the binomial
convolution matrix, with the true-count range extended internally before
truncation so the discarded tail stays below 1e-12.
"""

from dataclasses import dataclass, field

import numpy as np

from .states import DensityMatrix
from .forward import (
    PhaseScanSet,
    binomial_convolution_matrix,
    g_matrix,
    internal_count_range,
    scan_phase,
)


class ConditioningError(RuntimeError):
    def __init__(self, msg, s=None, cond=None):
        super().__init__(msg)
        self.s = s
        self.cond = cond


class DegenerateDesignError(ValueError):
    pass


class InsufficientPhasePointsError(ValueError):
    pass


class DataInconsistencyError(RuntimeError):
    pass


COND_LIMIT = 1e12


@dataclass
class DesignMatrixFamily:
    """A^(s) and pseudo-inverses M^(s) for s = 0..N1 at fixed |beta|, eta."""

    beta_abs: float
    eta: float
    n1: int
    n_count: int
    n_internal: int
    a: list  # a[s]: (n_count+1, n1+1-s)
    m: list  # m[s]: (n1+1-s, n_count+1)
    cond: np.ndarray  # condition number per s

    @property
    def s_max(self):
        return self.n1


def build_design(beta_abs, n1, n_count, eta=1.0):
    """Construct the design matrix family and its pseudo-inverses.

    A^(s)[n, m] = G[n, m] G[n, m+s] with the displaced-number kernel G;
    for eta < 1 the matrix is left-multiplied by the binomial convolution
    matrix over an extended internal count range.  M^(s) is computed by
    SVD (rank-revealing orthogonal decomposition); (A^T A)^(-1) A^T is the
    defining formula, not the algorithm.
    """
    if n_count < n1:
        raise ValueError(f"n_count={n_count} must be >= n1={n1}")
    if beta_abs < 0:
        raise ValueError("beta_abs must be >= 0")
    if beta_abs == 0.0 and n1 >= 1:
        raise DegenerateDesignError(
            "off-diagonal bands (s >= 1) are unobservable at zero displacement"
        )
    n_int = internal_count_range(n_count, eta)
    G = g_matrix(beta_abs, n_int, n1)
    conv = None
    if eta < 1.0:
        conv = binomial_convolution_matrix(eta, n_count, n_int)
    a_list, m_list, conds = [], [], []
    for s in range(n1 + 1):
        A = G[:, : n1 + 1 - s] * G[:, s : n1 + 1]
        A = conv @ A if conv is not None else A[: n_count + 1]
        sv = np.linalg.svd(A, compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise ConditioningError(
                f"design matrix for s={s} is rank deficient "
                f"(condition estimate {cond:.3g}) at |beta|={beta_abs}",
                s=s,
                cond=cond,
            )
        a_list.append(A)
        m_list.append(np.linalg.pinv(A))
        conds.append(cond)
    return DesignMatrixFamily(
        beta_abs=beta_abs, eta=eta, n1=n1, n_count=n_count, n_internal=n_int,
        a=a_list, m=m_list, cond=np.array(conds),
    )


def fourier_coefficients(scan, s, n1=None):
    """Discrete Fourier coefficient w^(s)(n) = (1/K) sum_k w(n, phi_k) e^{i s phi_k}.

    With K >= 2 N1 + 1 uniform phases the discrete transform equals the
    continuous integral exactly (the phase dependence is bandlimited to
    |s| <= N1).
    """
    k = scan.k_phases
    band = 2 * (n1 if n1 is not None else s)
    if k < band + 1:
        raise InsufficientPhasePointsError(
            f"{k} phase points cannot resolve Fourier orders up to "
            f"{band // 2} (need >= {band + 1})"
        )
    phase = np.exp(1j * s * scan.phases)
    return (scan.probs * phase[:, None]).mean(axis=0)


def reconstruct_fock(scan, design, renormalize=True, trace_limit=0.2):
    """Invert a PhaseScanSet into (DensityMatrix, diagnostics).

    For each s the band <m+s|rho|m> is M^(s) w^(s); the conjugate band is
    inferred by Hermitian symmetry rather than re-estimated.  The output
    is Hermitized and trace-renormalized, with corrections reported.
    """
    if abs(scan.beta_abs - design.beta_abs) > 1e-12:
        raise ValueError("scan and design disagree on |beta|")
    if abs(scan.eta - design.eta) > 1e-12:
        raise ValueError("scan and design disagree on eta")
    if scan.n_count != design.n_count:
        raise ValueError("scan and design disagree on the count range")
    n1 = design.n1
    if scan.k_phases < 2 * n1 + 1:
        raise InsufficientPhasePointsError(
            f"{scan.k_phases} phase points cannot resolve N1={n1} "
            f"(need >= {2 * n1 + 1})"
        )
    rho = np.zeros((n1 + 1, n1 + 1), dtype=complex)
    for s in range(n1 + 1):
        ws = fourier_coefficients(scan, s, n1=n1)
        band = design.m[s] @ ws
        for m in range(n1 + 1 - s):
            rho[m + s, m] = band[m]
            if s > 0:
                rho[m, m + s] = np.conj(band[m])
    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    rho = 0.5 * (rho + rho.conj().T)
    trace_raw = float(np.trace(rho).real)
    if abs(trace_raw - 1.0) > trace_limit:
        raise DataInconsistencyError(
            f"reconstructed trace {trace_raw:.4f} deviates from 1 by more "
            f"than {trace_limit}; data and design are likely inconsistent"
        )
    if renormalize:
        rho = rho / trace_raw
    diagnostics = {
        "hermiticity_defect": herm_defect,
        "trace_raw": trace_raw,
        "condition_numbers": design.cond.tolist(),
        "k_phases": scan.k_phases,
        "n1": n1,
        "n_count": design.n_count,
    }
    return DensityMatrix(rho, basis="fock"), diagnostics


def select_n1(scan, eta=None, n1_max=None, tail_limit=1e-3):
    """Smallest truncation N1 whose s=0 reconstruction has a negligible
    trailing diagonal element, re-running the inversion at each candidate."""
    eta = scan.eta if eta is None else eta
    if n1_max is None:
        n1_max = scan.n_count
    for n1 in range(1, n1_max + 1):
        design = build_design(scan.beta_abs, n1, scan.n_count, eta)
        w0 = fourier_coefficients(scan, 0, n1=0)
        diag = (design.m[0] @ w0).real
        if abs(diag[-1]) < tail_limit:
            return n1
    return n1_max


def beta_tradeoff_report(rho, beta_grid, runs, seeds, n_count=None, k_phases=None,
                         eta=1.0):
    """Monte Carlo standard error of each density matrix element vs |beta|.

    Simulates `runs` counts per phase for every seed, reconstructs, and
    tabulates per-element mean and standard error across seeds.  Returns a
    list of records (beta, row, col, mean_abs_error, std_err).
    """
    n1 = rho.n_trunc
    if n_count is None:
        n_count = n1 + 5
    if k_phases is None:
        k_phases = 2 * n1 + 3
    records = []
    for beta in beta_grid:
        design = build_design(beta, n1, n_count, eta)
        estimates = []
        for seed in seeds:
            scan = scan_phase(rho, beta, k_phases, n_count, eta=eta, runs=runs,
                              seed=seed)
            rec, _ = reconstruct_fock(scan, design, renormalize=False)
            estimates.append(rec.entries)
        est = np.array(estimates)
        mean = est.mean(axis=0)
        std_err = est.std(axis=0, ddof=1) / np.sqrt(len(seeds))
        spread = est.std(axis=0, ddof=1)
        for r in range(n1 + 1):
            for c in range(r, n1 + 1):
                records.append(
                    {
                        "beta": float(beta),
                        "row": r,
                        "col": c,
                        "mean_abs_error": float(abs(mean[r, c] - rho.entries[r, c])),
                        "std_err": float(abs(spread[r, c])),
                        "std_err_of_mean": float(abs(std_err[r, c])),
                        "cond_s": float(design.cond[c - r]),
                    }
                )
    return records
