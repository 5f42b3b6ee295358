"""Construction of the quantum states used throughout the package.

Single-mode states live in a truncated Fock basis (FockVector), fixed-N
two-mode states in the equivalent spin-j representation (SpinVector),
with j = N/2 and m = n - j mapping mode-1 occupation n to the magnetic
quantum number.
"""

from dataclasses import dataclass, field

import numpy as np

from .specfun import J_MAX_DEFAULT, log_factorials, spin_m_values, _two_j

NORM_EPS_DEFAULT = 1e-10
MAX_NORM_DEFICIT = 0.01


@dataclass
class FockVector:
    """Pure state amplitudes c_n over n = 0..N_trunc."""

    amplitudes: np.ndarray
    norm_deficit: float = 0.0

    @property
    def n_trunc(self):
        return len(self.amplitudes) - 1

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class SpinVector:
    """Pure spin-j state amplitudes over m = -j..j (ascending)."""

    j: float
    amplitudes: np.ndarray

    def __post_init__(self):
        if len(self.amplitudes) != _two_j(self.j) + 1:
            raise ValueError(
                f"spin-{self.j} vector needs {_two_j(self.j) + 1} amplitudes, "
                f"got {len(self.amplitudes)}"
            )


@dataclass
class DensityMatrix:
    """Complex Hermitian unit-trace matrix, tagged by its basis.

    basis is 'fock' (indices are occupation numbers 0..N_trunc) or 'spin'
    (indices are m = -j..j ascending, with j inferred from the dimension).
    """

    entries: np.ndarray
    basis: str = "fock"

    def __post_init__(self):
        if self.basis not in ("fock", "spin"):
            raise ValueError(f"unknown basis tag {self.basis!r}")

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def n_trunc(self):
        return self.dim - 1

    @property
    def j(self):
        return (self.dim - 1) / 2.0

    def validate(self, herm_tol=1e-12, trace_tol=1e-10, diag_tol=1e-12):
        """Raise ValueError if Hermiticity / trace / diagonal invariants fail."""
        r = self.entries
        if r.shape[0] != r.shape[1]:
            raise ValueError("density matrix must be square")
        if np.max(np.abs(r - r.conj().T)) > herm_tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(r).real - 1.0) > trace_tol or abs(np.trace(r).imag) > trace_tol:
            raise ValueError(f"trace is {np.trace(r)}, expected 1")
        d = np.diag(r)
        if np.max(np.abs(d.imag)) > diag_tol or np.min(d.real) < -diag_tol:
            raise ValueError("diagonal entries must be real and nonnegative")
        return self


def coherent_coefficients(alpha, n_trunc):
    """Amplitudes <n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!), unnormalized tail dropped."""
    lf = log_factorials(n_trunc)
    n = np.arange(n_trunc + 1)
    if alpha == 0:
        c = np.zeros(n_trunc + 1, dtype=complex)
        c[0] = 1.0
        return c
    return np.exp(
        -abs(alpha) ** 2 / 2 + n * np.log(complex(alpha)) - 0.5 * lf
    )


def squeezed_coefficients(x0, r, n_trunc, max_deficit=MAX_NORM_DEFICIT):
    """Fock amplitudes of a displaced squeezed state with real displacement x0.

    c_n = sqrt(2/(r+1)) r^(1/4) ((r-1)/(r+1))^(n/2) (2^n n!)^(-1/2)
          H_n(sqrt(2 r^2/(r^2-1)) x0) exp(-r x0^2/(r+1)),

    evaluated through a normalized Hermite recurrence so no intermediate
    overflows.  r -> 1 is the coherent-state limit and is handled as such
    (the Hermite argument diverges there).

    The returned vector is renormalized over the truncated window; the raw
    norm deficit 1 - sum|c_n|^2 is reported on the result and must not
    exceed max_deficit.
    """
    if r <= 0:
        raise ValueError(f"squeezing parameter must be positive, got r={r}")
    if n_trunc < 0:
        raise ValueError("n_trunc must be >= 0")
    if abs(r - 1.0) < 1e-9:
        c = coherent_coefficients(x0, n_trunc)
    else:
        # h[n] = H_n(y) / sqrt(2^n n!), recurrence h_{n+1} = y sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}
        y = np.sqrt(complex(2 * r**2 / (r**2 - 1))) * x0
        lam = complex(r - 1) / (r + 1)
        pref = np.sqrt(2 / (r + 1)) * r**0.25 * np.exp(-r / (r + 1) * x0**2)
        c = np.zeros(n_trunc + 1, dtype=complex)
        h_prev, h = 1.0, y * np.sqrt(2.0)
        c[0] = pref
        if n_trunc >= 1:
            c[1] = pref * lam**0.5 * h
        for n in range(1, n_trunc):
            h, h_prev = y * np.sqrt(2.0 / (n + 1)) * h - np.sqrt(n / (n + 1)) * h_prev, h
            c[n + 1] = pref * lam ** ((n + 1) / 2) * h
    norm_sq = float(np.sum(np.abs(c) ** 2))
    deficit = 1.0 - norm_sq
    if deficit > max_deficit:
        raise ValueError(
            f"truncation at n={n_trunc} loses {deficit:.3g} of the norm "
            f"(limit {max_deficit}); increase n_trunc"
        )
    return FockVector(c / np.sqrt(norm_sq), norm_deficit=deficit)


def mean_occupation(v):
    """<n> = sum n |c_n|^2 of a FockVector (after its normalization)."""
    n = np.arange(len(v.amplitudes))
    return float(np.sum(n * np.abs(v.amplitudes) ** 2))


def two_mode_spin_squeezed(x0, r, n_total):
    """Fixed-N two-mode squeezed state in the spin representation.

    Amplitude at m is proportional to c_{j+m} with j = N/2, renormalized.
    The admissibility precondition uses the untruncated mean occupation of
    mode 1, x0^2 + (r-1)^2/(4r) (verified against direct summation of the
    amplitude series at high precision).
    """
    if n_total < 0 or n_total != int(n_total):
        raise ValueError("total atom number must be a non-negative integer")
    n_total = int(n_total)
    fv = squeezed_coefficients(x0, r, n_total, max_deficit=1.0)
    # untruncated mean; window-truncated summation would under-count badly
    # truncated states and let inadmissible parameters through
    mean = x0**2 + (r - 1) ** 2 / (4 * r)
    if mean >= n_total:
        raise ValueError(
            f"mean mode-1 occupation {mean:.4f} must be below the total "
            f"atom number N={n_total}"
        )
    amps = fv.amplitudes / np.linalg.norm(fv.amplitudes)
    return SpinVector(j=n_total / 2.0, amplitudes=amps)


def fock_state(n, n_trunc):
    """Number state |n> in a basis truncated at N_trunc."""
    if not (0 <= n <= n_trunc):
        raise IndexError(f"fock index n={n} outside 0..{n_trunc}")
    c = np.zeros(n_trunc + 1, dtype=complex)
    c[int(n)] = 1.0
    return FockVector(c)


def atomic_coherent_amplitudes(j, theta, phi, j_max=J_MAX_DEFAULT):
    """Spin coherent state |theta, phi> amplitudes over m = -j..j.

    amplitude_m = sqrt(C(2j, j+m)) (sin theta/2)^(j+m) (cos theta/2)^(j-m) e^(-i m phi),
    which equals the Wigner-D column D^(j)_{m,-j}(0, theta, phi).
    """
    if j > j_max:
        raise ValueError(f"j={j} exceeds configured limit j_max={j_max}")
    tj = _two_j(j)
    ms = spin_m_values(j)
    lf = log_factorials(tj)
    k = np.arange(tj + 1)  # k = j + m
    log_binom = lf[tj] - lf[k] - lf[tj - k]
    s, c = np.sin(theta / 2.0), np.cos(theta / 2.0)
    # powers evaluated in linear space; exponents bounded by 2j
    amp = np.exp(0.5 * log_binom) * s**k * c ** (tj - k)
    return SpinVector(j=j, amplitudes=amp * np.exp(-1j * ms * phi))


def density_from_vector(v):
    """Outer product |v><v| as a DensityMatrix (vector is normalized first)."""
    amps = np.asarray(v.amplitudes, dtype=complex)
    amps = amps / np.linalg.norm(amps)
    basis = "spin" if isinstance(v, SpinVector) else "fock"
    return DensityMatrix(np.outer(amps, amps.conj()), basis=basis)
