"""Oracle tests for the special-function layer.

Every nontrivial value is checked against an independent computation:
matrix exponentials of angular momentum generators for rotation matrices,
mpmath arbitrary-precision evaluation for polynomial recurrences, and the
defining orthogonality sums for the 3j symbols.
"""

import math

import mpmath
import numpy as np
import pytest
from scipy.linalg import expm

from bectomo.specfun import (
    hermite,
    laguerre_assoc,
    log_factorial,
    log_factorials,
    spin_m_values,
    wigner_3j,
    wigner_D,
    wigner_d_small,
)


def angular_momentum_ops(j):
    """Dense J+, J-, Jy, Jz in the m-ascending basis (oracle helper)."""
    ms = spin_m_values(j)
    dim = len(ms)
    jz = np.diag(ms).astype(complex)
    jp = np.zeros((dim, dim), complex)
    for k in range(dim - 1):
        m = ms[k]
        jp[k + 1, k] = np.sqrt(j * (j + 1) - m * (m + 1))
    jy = (jp - jp.conj().T) / 2j
    return jp, jp.conj().T, jy, jz


def test_log_factorial_matches_lgamma():
    for n in (0, 1, 2, 7, 50, 170, 900):
        assert log_factorial(n) == pytest.approx(math.lgamma(n + 1), rel=1e-14)


def test_log_factorials_table_is_cumulative():
    lf = log_factorials(40)
    assert lf[0] == 0.0
    diffs = np.diff(lf) - np.log(np.arange(1, 41))
    assert np.max(np.abs(diffs)) < 1e-12


@pytest.mark.parametrize("n", [0, 1, 2, 5, 17, 40])
@pytest.mark.parametrize("x", [-2.3, 0.0, 0.7, 4.9])
def test_hermite_against_mpmath(n, x):
    want = float(mpmath.hermite(n, x))
    got = hermite(n, x)
    assert got == pytest.approx(want, rel=1e-11, abs=1e-11)


@pytest.mark.parametrize("n,a", [(0, 0), (3, 0), (5, 2), (8, 7), (12, 1)])
@pytest.mark.parametrize("x", [0.0, 0.09, 1.21, 6.5])
def test_laguerre_against_mpmath(n, a, x):
    want = float(mpmath.laguerre(n, a, x))
    got = laguerre_assoc(n, a, x)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("n,k", [(6, 3), (5, 1), (9, 9)])
@pytest.mark.parametrize("x", [0.0, 0.4, 2.7])
def test_laguerre_negative_upper_index_identity(n, k, x):
    # L_n^(-k)(x) = (-x)^k (n-k)!/n! L_{n-k}^(k)(x)
    want = (
        (-x) ** k
        * math.exp(log_factorial(n - k) - log_factorial(n))
        * laguerre_assoc(n - k, k, x)
    )
    assert laguerre_assoc(n, -k, x) == pytest.approx(want, rel=1e-11, abs=1e-13)


@pytest.mark.parametrize("j", [0.5, 1, 1.5, 2, 3.5, 5])
def test_small_d_matches_expm_of_jy(j):
    theta = 0.813
    _, _, jy, _ = angular_momentum_ops(j)
    u = expm(-1j * theta * jy)
    ms = spin_m_values(j)
    for a, mp in enumerate(ms):
        for b, m in enumerate(ms):
            assert wigner_d_small(j, mp, m, theta) == pytest.approx(
                u[a, b].real, abs=1e-12
            )
            assert abs(u[a, b].imag) < 1e-12


@pytest.mark.parametrize("j", [0.5, 1, 2.5, 4])
def test_full_d_matches_euler_expm(j):
    psi, theta, phi = 0.31, 1.27, 2.05
    _, _, jy, jz = angular_momentum_ops(j)
    u = expm(-1j * psi * jz) @ expm(-1j * theta * jy) @ expm(-1j * phi * jz)
    d = wigner_D(j, (psi, theta, phi)).entries
    assert np.max(np.abs(d - u)) < 1e-12


def test_full_d_is_unitary():
    d = wigner_D(3, (0.2, 0.9, 4.0)).entries
    assert np.max(np.abs(d @ d.conj().T - np.eye(7))) < 1e-13


def test_d_identity_at_zero_angles():
    d = wigner_D(1.5, (0.0, 0.0, 0.0)).entries
    assert np.max(np.abs(d - np.eye(4))) < 1e-15


def test_three_j_known_values():
    # closed forms of the simplest couplings
    assert wigner_3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / np.sqrt(3), abs=1e-14)
    assert wigner_3j(0.5, 0.5, 1, 0.5, 0.5, -1) == pytest.approx(
        -1 / np.sqrt(3), abs=1e-14
    )
    assert wigner_3j(2, 2, 2, 0, 0, 0) == pytest.approx(
        -np.sqrt(2.0 / 35.0), abs=1e-14
    )


def test_three_j_selection_rules():
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle violated
    assert wigner_3j(1, 1, 1, 1, 1, -2) == 0.0  # |m3| exceeds j3
    assert wigner_3j(1, 1, 2, 1, 1, 1) == 0.0  # m1+m2+m3 != 0


@pytest.mark.parametrize("j1,j2", [(0.5, 0.5), (1, 1), (1.5, 2)])
def test_three_j_orthogonality(j1, j2):
    # sum_{m1 m2} (2j3+1) (3j)^2 = 1 for every allowed (j3, m3)
    m1s = spin_m_values(j1)
    m2s = spin_m_values(j2)
    for j3 in np.arange(abs(j1 - j2), j1 + j2 + 1):
        for m3 in spin_m_values(j3):
            total = sum(
                (2 * j3 + 1) * wigner_3j(j1, j2, j3, m1, m2, m3) ** 2
                for m1 in m1s
                for m2 in m2s
            )
            assert total == pytest.approx(1.0, abs=1e-12)


def test_d_small_symmetry():
    # d^j_{m' m}(theta) = (-1)^(m'-m) d^j_{m m'}(theta)
    j, theta = 2.5, 0.67
    for mp in spin_m_values(j):
        for m in spin_m_values(j):
            lhs = wigner_d_small(j, mp, m, theta)
            rhs = (-1) ** int(round(mp - m)) * wigner_d_small(j, m, mp, theta)
            assert lhs == pytest.approx(rhs, abs=1e-13)


def test_spin_m_values_layout():
    assert np.allclose(spin_m_values(1.5), [-1.5, -0.5, 0.5, 1.5])
    assert np.allclose(spin_m_values(1), [-1, 0, 1])


def test_j_limit_enforced():
    with pytest.raises(ValueError):
        wigner_D(26, (0, 0.1, 0))
