"""Quasiprobability representations and state-comparison metrics.

Conventions: the planar Wigner function is normalized so that
int W d^2alpha = 1 and is bounded by |W| <= 2/pi; Q functions are
<coherent|rho|coherent> without extra 1/pi factors, so (1/pi) int Q
d^2alpha = 1 on the plane and ((2j+1)/4pi) int Q sin(theta) = 1 on the
sphere.

The Wigner function is the displaced-parity expectation
W(alpha) = (2/pi) Tr[rho D(2 alpha) P], evaluated through the closed-form
displacement matrix elements (Laguerre form), which is exact for a
Fock-truncated density matrix -- no parity-sum truncation is involved.
"""

from dataclasses import dataclass

import numpy as np

from .specfun import log_factorials, spin_m_values, _two_j
from .states import DensityMatrix, atomic_coherent_amplitudes

WIGNER_BOUND = 2.0 / np.pi


@dataclass
class QuasiprobGrid:
    """Real-valued samples of Q or W on a rectangular grid.

    kind: 'q_plane' | 'w_plane' (axes = Re alpha, Im alpha) or 'q_sphere'
    (axes = theta, phi).  values[i, k] corresponds to (axis1[i], axis2[k]).
    """

    kind: str
    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray


def _default_plane_axes(re_ax, im_ax):
    if re_ax is None:
        re_ax = np.linspace(-5.0, 5.0, 101)
    if im_ax is None:
        im_ax = np.linspace(-5.0, 5.0, 101)
    return np.asarray(re_ax, float), np.asarray(im_ax, float)


def q_plane(rho, re_ax=None, im_ax=None):
    """Husimi Q(alpha) = <alpha|rho|alpha> on a rectangular grid."""
    if rho.basis != "fock":
        raise ValueError("q_plane needs a fock-basis density matrix")
    re_ax, im_ax = _default_plane_axes(re_ax, im_ax)
    alpha = re_ax[:, None] + 1j * im_ax[None, :]
    n1 = rho.n_trunc
    lf = log_factorials(n1)
    # coherent amplitudes <n|alpha> stacked over the grid: (n, grid)
    ns = np.arange(n1 + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        loga = np.where(alpha == 0, 0.0, np.log(alpha.astype(complex)))
    vec = np.exp(
        -np.abs(alpha)[None] ** 2 / 2 + ns[:, None, None] * loga[None] - 0.5 * lf[:, None, None]
    )
    vec[np.broadcast_to(alpha == 0, vec.shape) & (ns[:, None, None] > 0)] = 0.0
    q = np.einsum("aij,ab,bij->ij", vec.conj(), rho.entries, vec).real
    return QuasiprobGrid(kind="q_plane", axis1=re_ax, axis2=im_ax, values=q)


def wigner_plane(rho, re_ax=None, im_ax=None):
    """Wigner function on a rectangular grid via displaced parity.

    W(alpha) = (2/pi) sum_kl rho_kl (-1)^k <l|D(2 alpha)|k>, with the
    displacement matrix elements in their Laguerre closed form.
    """
    if rho.basis != "fock":
        raise ValueError("wigner_plane needs a fock-basis density matrix")
    re_ax, im_ax = _default_plane_axes(re_ax, im_ax)
    alpha = re_ax[:, None] + 1j * im_ax[None, :]
    beta = 2.0 * alpha
    z = np.abs(beta) ** 2
    envelope = np.exp(-z / 2.0)
    n1 = rho.n_trunc
    lf = log_factorials(n1)
    w = np.zeros(alpha.shape)
    for d in range(n1 + 1):
        # generalized Laguerre L_deg^(d)(z) by upward degree recurrence,
        # consumed at each degree for the pair (lo=deg, hi=deg+d)
        l_prev = np.zeros_like(z)  # degree -1 sentinel
        lval = np.ones_like(z)
        for deg in range(0, n1 + 1 - d):
            lo, hi = deg, deg + d
            scale = np.exp(0.5 * (lf[lo] - lf[hi]))
            # element <hi|D(beta)|lo>, parity (-1)^lo acting on the ket side
            elem_hi_lo = scale * beta**d * envelope * lval
            if d == 0:
                w += ((-1) ** lo) * (rho.entries[lo, hi] * elem_hi_lo).real
            else:
                # <lo|D(beta)|hi> = scale (-beta*)^d envelope lval
                elem_lo_hi = scale * (-np.conj(beta)) ** d * envelope * lval
                term = (
                    rho.entries[lo, hi] * ((-1) ** lo) * elem_hi_lo
                    + rho.entries[hi, lo] * ((-1) ** hi) * elem_lo_hi
                )
                w += term.real
            lval, l_prev = (
                ((2 * deg + 1 + d - z) * lval - (deg + d) * l_prev) / (deg + 1),
                lval,
            )
    w *= 2.0 / np.pi
    return QuasiprobGrid(kind="w_plane", axis1=re_ax, axis2=im_ax, values=w)


def q_sphere(rho, theta_ax=None, phi_ax=None):
    """Spherical Q(theta, phi) = <theta,phi|rho|theta,phi> for a spin state."""
    if rho.basis != "spin":
        raise ValueError("q_sphere needs a spin-basis density matrix")
    if theta_ax is None:
        theta_ax = np.linspace(0.0, np.pi, 91)
    if phi_ax is None:
        phi_ax = np.linspace(0.0, 2 * np.pi, 181, endpoint=False)
    theta_ax = np.asarray(theta_ax, float)
    phi_ax = np.asarray(phi_ax, float)
    j = rho.j
    tj = _two_j(j)
    ms = spin_m_values(j)
    lf = log_factorials(tj)
    k = np.arange(tj + 1)
    log_binom = lf[tj] - lf[k] - lf[tj - k]
    s = np.sin(theta_ax / 2.0)[:, None]
    c = np.cos(theta_ax / 2.0)[:, None]
    radial = np.exp(0.5 * log_binom)[None, :] * s ** k[None, :] * c ** (tj - k)[None, :]
    phase = np.exp(-1j * np.outer(ms, phi_ax))  # (m, phi)
    # amp[m, theta, phi]
    amp = radial.T[:, :, None] * phase[:, None, :]
    q = np.einsum("atp,ab,btp->tp", amp.conj(), rho.entries, amp).real
    return QuasiprobGrid(kind="q_sphere", axis1=theta_ax, axis2=phi_ax, values=q)


def fidelity(rho_a, rho_b):
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2 in [0, 1].

    Slightly negative eigenvalues from noisy reconstructions are clipped
    to zero before the square roots.
    """
    if rho_a.basis != rho_b.basis or rho_a.dim != rho_b.dim:
        raise ValueError("fidelity requires matching basis and dimension")
    wa, va = np.linalg.eigh(rho_a.entries)
    sqrt_a = (va * np.sqrt(np.clip(wa, 0.0, None))) @ va.conj().T
    inner = sqrt_a @ rho_b.entries @ sqrt_a
    ev = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    f = float(np.sum(np.sqrt(np.clip(ev, 0.0, None))) ** 2)
    return min(f, 1.0)
