"""Quasiprobability grids checked against brute-force definitions."""

import numpy as np
import pytest
from scipy.linalg import expm

from bectomo.quasiprob import WIGNER_BOUND, fidelity, q_plane, q_sphere, wigner_plane
from bectomo.states import (
    atomic_coherent_amplitudes,
    coherent_coefficients,
    density_from_vector,
    fock_state,
    squeezed_coefficients,
)

from test_forward import displacement_expm, rand_rho


def wigner_brute(rho_entries, alpha, dim=60):
    """Displaced-parity expectation with explicit expm displacement (oracle)."""
    big = np.zeros((dim, dim), complex)
    n = rho_entries.shape[0]
    big[:n, :n] = rho_entries
    d = displacement_expm(2 * alpha, dim)
    parity = np.diag((-1.0) ** np.arange(dim))
    return (2 / np.pi) * np.trace(big @ d @ parity).real


def test_wigner_matches_brute_force_parity():
    rho = rand_rho(6, seed=31)
    pts = [0.0 + 0.0j, 0.7 - 0.3j, -1.2 + 0.9j, 2.0 + 2.0j]
    grid = wigner_plane(rho, [p.real for p in pts], [0.0])
    for i, p in enumerate(pts):
        got = wigner_plane(rho, [p.real], [p.imag]).values[0, 0]
        assert got == pytest.approx(wigner_brute(rho.entries, p), abs=1e-12)
    assert grid.values.shape == (4, 1)


def test_wigner_fock_values_at_origin():
    # W(0) = (2/pi)(-1)^n for the number state |n>
    for n in (0, 1, 5):
        rho = density_from_vector(fock_state(n, n))
        w0 = wigner_plane(rho, [0.0], [0.0]).values[0, 0]
        assert w0 == pytest.approx((2 / np.pi) * (-1) ** n, abs=1e-13)


def test_wigner_coherent_is_shifted_gaussian():
    alpha0 = 0.8 + 0.5j
    rho = density_from_vector(
        type("V", (), {"amplitudes": coherent_coefficients(alpha0, 30)})()
    )
    xs = np.linspace(-2, 2, 9)
    grid = wigner_plane(rho, xs, xs)
    a = xs[:, None] + 1j * xs[None, :]
    want = (2 / np.pi) * np.exp(-2 * np.abs(a - alpha0) ** 2)
    assert np.max(np.abs(grid.values - want)) < 1e-8


def test_wigner_normalization_and_bound():
    rho = density_from_vector(squeezed_coefficients(np.sqrt(3), np.e, 12))
    xs = np.linspace(-6, 6, 161)
    grid = wigner_plane(rho, xs, xs)
    dx = xs[1] - xs[0]
    assert grid.values.sum() * dx * dx == pytest.approx(1.0, abs=1e-6)
    assert np.max(np.abs(grid.values)) <= WIGNER_BOUND + 1e-12


def test_q_plane_matches_coherent_overlap():
    rho = rand_rho(5, seed=7)
    for alpha in (0.0, 0.6 - 1.1j, 1.5 + 0.2j):
        c = coherent_coefficients(alpha, 4)
        want = np.real(c.conj() @ rho.entries @ c)
        got = q_plane(rho, [alpha.real], [alpha.imag]).values[0, 0]
        # truncating <n|alpha> at the state dimension is exact here
        assert got == pytest.approx(want, abs=1e-13)


def test_q_plane_nonnegative_and_normalized():
    rho = rand_rho(4, seed=12)
    xs = np.linspace(-5, 5, 121)
    grid = q_plane(rho, xs, xs)
    assert grid.values.min() >= -1e-15
    dx = xs[1] - xs[0]
    assert grid.values.sum() * dx * dx / np.pi == pytest.approx(1.0, abs=1e-5)


def test_q_sphere_matches_atomic_coherent_overlap():
    rho = rand_rho(6, seed=5, basis="spin")  # j = 5/2
    for theta, phi in [(0.0, 0.0), (0.9, 1.7), (2.6, 5.1)]:
        amp = atomic_coherent_amplitudes(2.5, theta, phi).amplitudes
        want = np.real(amp.conj() @ rho.entries @ amp)
        got = q_sphere(rho, [theta], [phi]).values[0, 0]
        assert got == pytest.approx(want, abs=1e-13)


def test_q_sphere_normalization():
    rho = rand_rho(5, seed=19, basis="spin")  # j = 2
    thetas = np.linspace(0, np.pi, 201)
    phis = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    grid = q_sphere(rho, thetas, phis)
    dth, dph = thetas[1] - thetas[0], phis[1] - phis[0]
    integral = np.sum(grid.values * np.sin(thetas)[:, None]) * dth * dph
    assert integral * (2 * 2 + 1) / (4 * np.pi) == pytest.approx(1.0, abs=1e-3)


def test_fidelity_pure_states_is_overlap_squared():
    a = density_from_vector(fock_state(0, 3))
    b = density_from_vector(fock_state(1, 3))
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(a, b) == pytest.approx(0.0, abs=1e-12)
    c = coherent_coefficients(0.7, 3)
    rho_c = density_from_vector(type("V", (), {"amplitudes": c})())
    overlap = np.abs(c / np.linalg.norm(c))[0] ** 2
    assert fidelity(a, rho_c) == pytest.approx(overlap, abs=1e-10)


def test_fidelity_is_symmetric_for_mixed_states():
    a = rand_rho(4, seed=1)
    b = rand_rho(4, seed=2)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)
    assert 0.0 <= fidelity(a, b) <= 1.0


def test_fidelity_rejects_basis_mismatch():
    a = rand_rho(4, seed=1)
    b = rand_rho(4, seed=2, basis="spin")
    with pytest.raises(ValueError):
        fidelity(a, b)
