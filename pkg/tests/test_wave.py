import numpy as np
import pytest
from numpy.testing import assert_allclose

from hamrom.core import check_skew, eval_hamiltonian, rhs
from hamrom.integrator import IntegratorConfig, integrate
from hamrom.wave import (
    WaveConfig,
    assemble_wave_fom,
    build_laplacian,
    bump_spline,
    initial_state,
    make_wave_energy,
    make_wave_rhs,
    spline_initial_condition,
)


def test_laplacian_default_coefficients():
    lap = build_laplacian(WaveConfig())
    assert_allclose(lap.coeff, 2500.0)
    assert_allclose(np.diag(lap.matrix), -5000.0)


def test_laplacian_annihilates_constants():
    lap = build_laplacian(WaveConfig(n=32))
    assert np.max(np.abs(lap.matrix @ np.ones(32))) <= 1e-9


def test_laplacian_circulant_eigenvalues():
    cfg = WaveConfig(n=4)
    lap = build_laplacian(cfg)
    eig = np.sort(np.linalg.eigvalsh(lap.matrix))
    j = np.arange(4)
    expected = np.sort(-4.0 * lap.coeff * np.sin(np.pi * j / 4) ** 2)
    assert_allclose(eig, expected, atol=1e-9)


def test_laplacian_negative_semidefinite():
    for n in (8, 33, 64):
        lap = build_laplacian(WaveConfig(n=n))
        assert np.max(np.linalg.eigvalsh(lap.matrix)) <= 1e-9


def test_too_few_points_rejected():
    with pytest.raises(ValueError):
        WaveConfig(n=2)


def test_spline_profile_values():
    assert bump_spline(0.0) == 1.0
    # continuity at the branch boundary
    assert_allclose(bump_spline(1.0), 0.25)
    assert_allclose(0.25 * (2.0 - 1.0) ** 3, 0.25)
    assert bump_spline(2.5) == 0.0


def test_initial_condition_support():
    cfg = WaveConfig()
    u0 = spline_initial_condition(cfg)
    x = cfg.grid()
    outside = np.abs(x - 0.5) > 0.2
    assert np.all(u0[outside] == 0.0)
    assert_allclose(np.max(u0), 1.0, rtol=1e-12)  # peak at x = 0.5


def test_assembled_operators_structure(small_wave):
    fom = small_wave["fom"]
    n = small_wave["cfg"].n
    assert check_skew(fom.D.matrix, 1e-14)
    assert_allclose(fom.H.Q[n:, n:], np.eye(n))
    assert np.all(fom.H.c[:n] == 1.0) and np.all(fom.H.c[n:] == 0.0)


def test_rhs_matches_block_formula(small_wave):
    cfg, fom = small_wave["cfg"], small_wave["fom"]
    n = cfg.n
    lap = build_laplacian(cfg)
    rng = np.random.default_rng(7)
    for _ in range(5):
        z = rng.standard_normal(2 * n)
        u, v = z[:n], z[n:]
        expected = np.concatenate([v, lap.matrix @ u - np.sin(u)])
        assert_allclose(rhs(fom, z), expected, atol=1e-14 * max(1, np.max(np.abs(expected))))
        assert_allclose(make_wave_rhs(cfg)(z), expected, atol=1e-13)


def test_rhs_at_rest_initial_state(small_wave):
    cfg, fom = small_wave["cfg"], small_wave["fom"]
    n = cfg.n
    z0 = small_wave["z0"]
    out = rhs(fom, z0)
    assert_allclose(out[:n], np.zeros(n))  # u-block carries v = 0
    lap = build_laplacian(cfg)
    assert_allclose(out[n:], lap.matrix @ z0[:n] - np.sin(z0[:n]), atol=1e-13)


def test_energy_matches_literal_formula(small_wave):
    cfg, fom = small_wave["cfg"], small_wave["fom"]
    n = cfg.n
    lap = build_laplacian(cfg)
    rng = np.random.default_rng(11)
    for _ in range(5):
        z = rng.standard_normal(2 * n)
        u, v = z[:n], z[n:]
        literal = 0.5 * v @ v - 0.5 * u @ (lap.matrix @ u) + np.sum(1.0 - np.cos(u))
        assert_allclose(eval_hamiltonian(fom.H, z), literal, rtol=1e-13)
        assert_allclose(make_wave_energy(cfg)(z), literal, rtol=1e-13)


def test_reference_energy_value():
    # benchmark-scale check of the initial discrete energy
    cfg = WaveConfig()
    energy = make_wave_energy(cfg)(initial_state(cfg))
    assert abs(energy * cfg.dx - 1.258e-1) <= 0.005 * 1.258e-1


def test_linear_wave_energy_exactly_conserved():
    # with the nonlinearity off, the energy is a quadratic invariant and the
    # midpoint rule preserves it to the fixed-point tolerance
    cfg = WaveConfig(n=64)
    lap = build_laplacian(cfg)
    n = cfg.n

    def f(z):
        return np.concatenate([z[n:], lap.csr @ z[:n]])

    def quad_energy(z):
        return 0.5 * z[n:] @ z[n:] - 0.5 * z[:n] @ (lap.csr @ z[:n])

    icfg = IntegratorConfig(dt=0.01, t_final=1.0)
    traj = integrate(f, initial_state(cfg), icfg)
    e = np.array([quad_energy(z) for z in traj.states])
    assert np.max(np.abs(e - e[0])) <= 100 * 1e-12 * max(1.0, abs(e[0]))
