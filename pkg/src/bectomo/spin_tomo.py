"""Case I reconstruction: invert spin marginals w(m, theta, phi) back to
the spin-j density matrix by quadrature over the rotation group.

The inversion kernel combines a rank-j' Wigner-d factor with two 3j
symbols; with Gauss-Legendre nodes in cos(theta) and a uniform phi grid
the integrand is resolved exactly (it is bandlimited in both variables),
so on exact data the reconstruction is an identity map to machine
precision.

Phase bookkeeping for half-integer j: the (-1)^m factors of the inversion
kernel are complex phases.  The consistent choice (verified by the
round-trip identity at j = 1/2 and 3/2) is exp(-i pi m) on the summed
outcome index and exp(+i pi m2) on the column index of the output.
"""

from dataclasses import dataclass

import numpy as np

from .specfun import spin_m_values, wigner_3j, wigner_d_small, _two_j
from .states import DensityMatrix
from .forward import RotationSetting, SpinMarginalSet, scan_spin


class GridTooCoarseError(ValueError):
    pass


@dataclass
class QuadratureGrid:
    """Gauss-Legendre theta nodes (in cos theta) x uniform phi grid.

    The psi Euler angle is eliminated analytically: the inversion kernel
    carries no psi dependence, so its integral contributes the constant
    2 pi absorbed into the measure.
    """

    theta_nodes: np.ndarray
    theta_weights: np.ndarray
    phi_nodes: np.ndarray

    @classmethod
    def build(cls, j, n_theta=None, n_phi=None):
        tj = _two_j(j)
        if n_theta is None:
            n_theta = tj + 2
        if n_phi is None:
            n_phi = 2 * tj + 3
        x, w = np.polynomial.legendre.leggauss(n_theta)
        return cls(theta_nodes=np.arccos(x), theta_weights=w,
                   phi_nodes=2 * np.pi * np.arange(n_phi) / n_phi)

    @property
    def n_theta(self):
        return len(self.theta_nodes)

    @property
    def n_phi(self):
        return len(self.phi_nodes)

    def check_resolves(self, j):
        """Raise GridTooCoarseError below the exactness bounds for spin j."""
        tj = _two_j(j)
        if self.n_theta < tj + 1:
            raise GridTooCoarseError(
                f"need >= {tj + 1} theta nodes for j={j}, have {self.n_theta}"
            )
        if self.n_phi < 2 * tj + 1:
            raise GridTooCoarseError(
                f"need >= {2 * tj + 1} phi nodes for j={j}, have {self.n_phi}"
            )

    def settings(self):
        """Theta-major list of RotationSettings matching the data layout."""
        return [
            RotationSetting(theta=t, phi=p)
            for t in self.theta_nodes
            for p in self.phi_nodes
        ]


def reconstruct_spin(data, grid, renormalize=True, check_grid=True):
    """Invert a SpinMarginalSet into (DensityMatrix, diagnostics).

    The raw linear estimate is Hermitized ((rho + rho+)/2) and, unless
    renormalize=False, trace-renormalized; both corrections are reported
    in the diagnostics dict.
    """
    j = data.j
    tj = _two_j(j)
    if check_grid:
        grid.check_resolves(j)
    ms = spin_m_values(j)
    n_th, n_ph = grid.n_theta, grid.n_phi
    if data.probs.shape != (n_th * n_ph, tj + 1):
        raise ValueError(
            f"data shape {data.probs.shape} does not match grid "
            f"({n_th}x{n_ph} settings, {tj + 1} outcomes)"
        )
    if tj == 0:
        rho = DensityMatrix(np.array([[1.0 + 0j]]), basis="spin")
        return rho, {"hermiticity_defect": 0.0, "trace_raw": 1.0}

    W = data.probs.reshape(n_th, n_ph, tj + 1)
    wt = grid.theta_weights
    phis = grid.phi_nodes
    phase_m = np.exp(-1j * np.pi * ms)  # exp(-i pi m) on the outcome index

    # d^{j'}_{0 mp}(theta) tables, and the theta-phi integrals
    # I[jp, mp, m] = (1/4 pi) sum_t w_t d^{jp}_{0 mp}(t) sum_p (2pi/K) e^{-i mp p} W[t,p,m]
    fphi = np.exp(-1j * np.outer(np.arange(-tj, tj + 1), phis))  # (2tj+1, n_ph)
    wphi = np.einsum("up,tpm->tum", fphi, W) * (2 * np.pi / n_ph)  # (n_th, mp, m)
    integrals = {}
    for jp in range(tj + 1):
        dtab = np.array(
            [
                [wigner_d_small(jp, 0, mp, t) for t in grid.theta_nodes]
                for mp in range(-jp, jp + 1)
            ]
        )  # (2jp+1, n_th)
        # map mp index into the wphi axis (offset tj)
        for i_mp, mp in enumerate(range(-jp, jp + 1)):
            integrals[(jp, mp)] = (
                np.einsum("t,t,tm->m", wt, dtab[i_mp], wphi[:, mp + tj, :])
                / (4 * np.pi)
            )

    three_j_0 = {
        jp: np.array([wigner_3j(j, j, jp, m, -m, 0) for m in ms])
        for jp in range(tj + 1)
    }

    rho = np.zeros((tj + 1, tj + 1), dtype=complex)
    for i1, m1 in enumerate(ms):
        for i2, m2 in enumerate(ms):
            mp = int(round(m2 - m1))  # 3j selection fixes the Euler-phi order
            tot = 0.0 + 0.0j
            for jp in range(abs(mp), tj + 1):
                w2 = wigner_3j(j, j, jp, m1, -m2, mp)
                if w2 == 0.0:
                    continue
                s = np.sum(phase_m * three_j_0[jp] * integrals[(jp, mp)])
                tot += (2 * jp + 1) ** 2 * w2 * s
            rho[i1, i2] = np.exp(1j * np.pi * m2) * tot

    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    rho = 0.5 * (rho + rho.conj().T)
    trace_raw = float(np.trace(rho).real)
    if renormalize:
        if abs(trace_raw) < 1e-12:
            raise ValueError("reconstructed trace is zero; cannot renormalize")
        rho = rho / trace_raw
    diagnostics = {
        "hermiticity_defect": herm_defect,
        "trace_raw": trace_raw,
        "n_theta": n_th,
        "n_phi": n_ph,
    }
    return DensityMatrix(rho, basis="spin"), diagnostics


def condition_report(j, grid):
    """Empirical round-trip check of the forward/inverse pair on spin j.

    Propagates a Hermitian operator basis through exact marginals and the
    reconstruction (without renormalization) and reports the worst-case
    max-abs round-trip error.
    """
    tj = _two_j(j)
    dim = tj + 1
    settings = grid.settings()
    worst = 0.0
    basis = []
    for a in range(dim):
        e = np.zeros((dim, dim), complex)
        e[a, a] = 1.0
        basis.append(e)
        for b in range(a + 1, dim):
            e = np.zeros((dim, dim), complex)
            e[a, b] = e[b, a] = 1.0 / np.sqrt(2)
            basis.append(e)
            e = np.zeros((dim, dim), complex)
            e[a, b] = -1j / np.sqrt(2)
            e[b, a] = 1j / np.sqrt(2)
            basis.append(e)
    for op in basis:
        rho_in = DensityMatrix(op, basis="spin")
        data = scan_spin(rho_in, settings)
        rec, _ = reconstruct_spin(data, grid, renormalize=False, check_grid=False)
        worst = max(worst, float(np.max(np.abs(rec.entries - op))))
    return {
        "j": j,
        "n_theta": grid.n_theta,
        "n_phi": grid.n_phi,
        "worst_roundtrip_error": worst,
        "basis_size": len(basis),
    }
