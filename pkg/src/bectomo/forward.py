"""Measurement simulation: beam-splitter marginals, displaced-number
probabilities, detector inefficiency, and finite-statistics sampling.

Phase conventions
-----------------
The physical mixer exp(-i theta J.u_phi) equals the Euler rotation
D(-phi - pi/2, theta, phi + pi/2) in the z-y-z convention used by
`specfun.wigner_D`.  The psi angle cancels on the diagonal of D rho D+,
so the spin marginal is computed from D(0, theta, phi) directly; the pi/2
offset between the nominal mixer phase and the Euler phi is an overall
relabeling of the phase grid and is never observable in a full scan.

Likewise the displaced-number scan is parameterized directly by the
effective phase  varphi = arg(beta_bar) - phi + pi/2;  absolute phase
offsets are unobservable gauge.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .specfun import log_factorials, laguerre_assoc, wigner_D, _two_j
from .states import DensityMatrix


@dataclass
class RotationSetting:
    """One beam-splitter setting: theta in [0, pi], phi in [0, 2 pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi + 1e-12):
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not (0.0 <= self.phi < 2 * np.pi + 1e-12):
            raise ValueError(f"phi={self.phi} outside [0, 2 pi)")


@dataclass
class SpinMarginalSet:
    """Count-difference probabilities w[setting][m] for a spin-j system.

    Case I data: detection of both modes makes the efficiency unity
    (runs with total counts != N are discarded), so there is no eta field.
    """

    j: float
    settings: list
    probs: np.ndarray  # (n_settings, 2j+1), m ascending
    runs: int = None  # None means exact probabilities
    seed: int = None
    noise_model: str = "multinomial"

    def validate_exact(self, tol=1e-10):
        sums = self.probs.sum(axis=1)
        if np.max(np.abs(sums - 1.0)) > tol:
            raise ValueError("marginal rows do not sum to 1")
        if self.probs.min() < -1e-12:
            raise ValueError("negative probability in exact marginal set")
        return self


@dataclass
class PhaseScanSet:
    """Displaced-number probabilities w[k][n] over a uniform phase grid."""

    beta_abs: float
    phases: np.ndarray  # K values, 2 pi k / K
    probs: np.ndarray  # (K, n_count+1)
    eta: float = 1.0
    runs: int = None
    seed: int = None
    noise_model: str = "multinomial"
    random_phase: bool = False

    @property
    def n_count(self):
        return self.probs.shape[1] - 1

    @property
    def k_phases(self):
        return len(self.phases)


def spin_marginal_exact(rho, setting):
    """Outcome probabilities w(m) = [D rho D+]_mm at one rotation setting.

    D = D^(j)(0, theta, phi); the result is independent of the psi Euler
    angle.  m index runs -j..j ascending.
    """
    if rho.basis != "spin":
        raise ValueError("spin_marginal_exact needs a spin-basis density matrix")
    D = wigner_D(rho.j, (0.0, setting.theta, setting.phi)).entries
    return np.real(np.einsum("mk,kl,ml->m", D, rho.entries, D.conj()))


def g_matrix(beta_abs, n_rows, m_cols):
    """Real displaced-number kernel G[n, m], n = 0..n_rows, m = 0..m_cols.

    G[n, m] = exp(-x/2) sqrt(n!/m!) b^(m-n) L_n^(m-n)(x)   with x = b^2,

    evaluated in the numerically benign orientation (Laguerre degree
    min(n, m), upper index |n - m|) so no factorial ratio overflows.
    The displaced-number probability is w(n) = sum_km rho_km G[n,k] G[n,m]
    e^{i(m-k) varphi}, and the order-s design matrix is
    A^(s)[n, m] = G[n, m] G[n, m+s].
    """
    x = beta_abs**2
    lf = log_factorials(max(n_rows, m_cols))
    n = np.arange(n_rows + 1)[:, None]
    m = np.arange(m_cols + 1)[None, :]
    lo = np.minimum(n, m)
    hi = np.maximum(n, m)
    d = hi - lo
    if beta_abs == 0.0:
        return np.eye(n_rows + 1, m_cols + 1)
    log_mag = -x / 2 + 0.5 * (lf[lo] - lf[hi]) + d * np.log(beta_abs)
    sign = np.where((n > m) & (d % 2 == 1), -1.0, 1.0)
    lag = np.zeros((n_rows + 1, m_cols + 1))
    for i in range(n_rows + 1):
        for k in range(m_cols + 1):
            lag[i, k] = laguerre_assoc(min(i, k), abs(i - k), x)
    return sign * np.exp(log_mag) * lag


def displaced_number_exact(rho, beta_abs, phase, n_count):
    """Probability of n counts, n = 0..n_count, at effective phase `phase`.

    Implements the Laguerre double sum for the displaced-number
    distribution of a Fock-truncated density matrix; requires
    n_count >= the truncation index of rho.
    """
    if rho.basis != "fock":
        raise ValueError("displaced_number_exact needs a fock-basis density matrix")
    n1 = rho.n_trunc
    if n_count < n1:
        raise ValueError(f"n_count={n_count} must be >= state truncation {n1}")
    G = g_matrix(beta_abs, n_count, n1)
    F = G * np.exp(1j * np.arange(n1 + 1) * phase)[None, :]
    w = np.einsum("nk,km,nm->n", F.conj(), rho.entries, F).real
    if not np.all(np.isfinite(w)):
        raise OverflowError(
            f"displaced-number evaluation overflowed at |beta|={beta_abs}, "
            f"n_count={n_count}"
        )
    return w


def binomial_convolution_matrix(eta, k_out, n_in):
    """Matrix B[k, n] = C(n, k) eta^k (1-eta)^(n-k) mapping true to detected counts."""
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"efficiency must be in (0, 1], got {eta}")
    k = np.arange(k_out + 1)[:, None]
    n = np.arange(n_in + 1)[None, :]
    return binom.pmf(k, n, eta)


def efficiency_convolve(w, eta, k_out=None):
    """Binomial convolution of an ideal count distribution with efficiency eta."""
    w = np.asarray(w, dtype=float)
    if k_out is None:
        k_out = len(w) - 1
    if eta == 1.0:
        out = np.zeros(k_out + 1)
        out[: min(len(w), k_out + 1)] = w[: k_out + 1]
        return out
    return binomial_convolution_matrix(eta, k_out, len(w) - 1) @ w


def internal_count_range(n_count, eta):
    """True-count truncation used before the efficiency convolution."""
    if eta >= 1.0:
        return n_count
    # a true count at the extended edge leaks < 1e-12 of its mass into the
    # recorded range, so discarding everything beyond it is invisible
    return n_count + int(np.ceil(18.0 / eta))


def sample_counts(w, runs, seed=None, noise_model="multinomial", gaussian_scale=1.0,
                  rng=None):
    """Finite-statistics version of a probability vector.

    multinomial: draw `runs` i.i.d. outcomes, return relative frequencies.
    gaussian: perturb each entry by N(0, gaussian_scale * w / runs), clip
    at zero and renormalize by global rescaling.  runs=None returns w
    unchanged (exact sentinel).
    """
    w = np.asarray(w, dtype=float)
    if runs is None:
        return w.copy()
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    if noise_model == "multinomial":
        p = np.clip(w, 0.0, None)
        rest = 1.0 - p.sum()
        if rest > 1e-12:  # truncated tail: add an overflow bin, drop it after
            counts = rng.multinomial(runs, np.append(p, rest) / (p.sum() + rest))[:-1]
        else:
            counts = rng.multinomial(runs, p / p.sum())
        return counts / runs
    if noise_model == "gaussian":
        noisy = w + rng.normal(0.0, 1.0, size=w.shape) * (gaussian_scale * w / runs)
        noisy = np.clip(noisy, 0.0, None)
        total = noisy.sum()
        if total > 0 and w.sum() > 0:
            noisy *= w.sum() / total
        return noisy
    raise ValueError(f"unknown noise model {noise_model!r}")


def _spawn_rngs(seed, n):
    """Independent per-setting generators split from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def scan_spin(rho, settings, runs=None, seed=0, noise_model="multinomial",
              gaussian_scale=1.0):
    """Batch spin marginals over a list of RotationSettings.

    Exact mode (runs=None) guarantees normalized rows.  Randomness is split
    per setting from the master seed, so results do not depend on
    evaluation order.
    """
    exact = np.array([spin_marginal_exact(rho, s) for s in settings])
    if runs is None:
        probs = exact
    else:
        rngs = _spawn_rngs(seed, len(settings))
        probs = np.array(
            [
                sample_counts(row, runs, noise_model=noise_model,
                              gaussian_scale=gaussian_scale, rng=rng)
                for row, rng in zip(exact, rngs)
            ]
        )
    return SpinMarginalSet(j=rho.j, settings=list(settings), probs=probs,
                           runs=runs, seed=seed, noise_model=noise_model)


def phase_averaged_distribution(rho, beta_abs, n_count):
    """Count distribution under a uniformly random reference phase.

    The continuous phase average kills every off-diagonal contribution,
    leaving w_bar(n) = sum_m G[n,m]^2 rho_mm exactly.
    """
    G = g_matrix(beta_abs, n_count, rho.n_trunc)
    return (G**2) @ np.real(np.diag(rho.entries))


def scan_phase(rho, beta_abs, k_phases, n_count, eta=1.0, runs=None, seed=0,
               noise_model="multinomial", gaussian_scale=1.0, random_phase=False):
    """Displaced-number scan over K uniform effective phases 2 pi k / K.

    Detector inefficiency is applied as a binomial convolution of the
    ideal distribution evaluated on an extended internal count range.
    With random_phase=True each experimental run sees a uniformly random
    phase but the data is recorded under the nominal grid, so every row
    is drawn from the exact phase-averaged distribution.
    """
    if k_phases < 1:
        raise ValueError("k_phases must be >= 1")
    phases = 2 * np.pi * np.arange(k_phases) / k_phases
    n_int = internal_count_range(n_count, eta)
    if random_phase:
        w_int = phase_averaged_distribution(rho, beta_abs, n_int)
        rows_exact = np.tile(efficiency_convolve(w_int, eta, n_count), (k_phases, 1))
    else:
        rows_exact = np.array(
            [
                efficiency_convolve(
                    displaced_number_exact(rho, beta_abs, p, n_int), eta, n_count
                )
                for p in phases
            ]
        )
    if runs is None:
        probs = rows_exact
    else:
        rngs = _spawn_rngs(seed, k_phases)
        probs = np.array(
            [
                sample_counts(row, runs, noise_model=noise_model,
                              gaussian_scale=gaussian_scale, rng=rng)
                for row, rng in zip(rows_exact, rngs)
            ]
        )
    return PhaseScanSet(beta_abs=beta_abs, phases=phases, probs=probs, eta=eta,
                        runs=runs, seed=seed, noise_model=noise_model,
                        random_phase=random_phase)
