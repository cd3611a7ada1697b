"""Nonlinear-wave benchmark: periodic finite differences and system assembly.

The PDE u_tt = c^2 u_xx - sin(u) on a periodic domain [0, l] is
semi-discretized with a three-point stencil on n grid points x_i = i*dx.
In first-order form z = (u, v) the system is Hamiltonian with

    D = [[0, I], [-I, 0]],   Q = blkdiag(-A, I),   G(x) = 1 - cos(x),

and the nonlinear weights equal one on the u-block and zero on the
v-block, so that H(z) = 0.5 v^T v - 0.5 u^T A u + sum_i (1 - cos u_i).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse

from .core import HamiltonianSystem, SkewOperator, SplitHamiltonian

__all__ = [
    "WaveConfig",
    "LaplacianOperator",
    "build_laplacian",
    "bump_spline",
    "spline_initial_condition",
    "initial_state",
    "assemble_wave_fom",
    "make_wave_rhs",
    "make_wave_energy",
]


@dataclass(frozen=True)
class WaveConfig:
    """Benchmark discretization parameters (defaults: n=500, dx=2e-3)."""

    c_speed: float = 0.1
    length: float = 1.0
    n: int = 500

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("need at least 3 grid points for the periodic stencil")
        if self.length <= 0 or self.c_speed <= 0:
            raise ValueError("length and c_speed must be positive")

    @property
    def dx(self) -> float:
        return self.length / self.n

    def grid(self) -> np.ndarray:
        return self.dx * np.arange(self.n)


class LaplacianOperator:
    """Scaled periodic second-difference operator c^2/dx^2 * (1, -2, 1)."""

    def __init__(self, cfg: WaveConfig):
        n = cfg.n
        k = cfg.c_speed**2 / cfg.dx**2
        mat = np.zeros((n, n))
        idx = np.arange(n)
        mat[idx, idx] = -2.0 * k
        mat[idx, (idx + 1) % n] = k
        mat[idx, (idx - 1) % n] = k
        self.coeff = k
        self.matrix = mat
        self.csr = sparse.csr_matrix(mat)

    def apply(self, u):
        return self.csr @ u


def build_laplacian(cfg: WaveConfig) -> LaplacianOperator:
    """Assemble the periodic Laplacian for the given grid."""
    return LaplacianOperator(cfg)


def bump_spline(s):
    """Cubic spline profile: 1 - 1.5 s^2 + 0.75 s^3 on [0,1],
    0.25 (2-s)^3 on (1,2], zero beyond."""
    s = np.asarray(s, dtype=float)
    return np.where(
        s <= 1.0,
        1.0 - 1.5 * s**2 + 0.75 * s**3,
        np.where(s <= 2.0, 0.25 * (2.0 - s) ** 3, 0.0),
    )


def spline_initial_condition(cfg: WaveConfig) -> np.ndarray:
    """Initial displacement u0[i] = f(10 |x_i - 1/2|) on the grid."""
    return bump_spline(10.0 * np.abs(cfg.grid() - 0.5))


def initial_state(cfg: WaveConfig) -> np.ndarray:
    """Full initial state z0 = (u0, 0) of length 2n."""
    return np.concatenate([spline_initial_condition(cfg), np.zeros(cfg.n)])


def assemble_wave_fom(cfg: WaveConfig) -> HamiltonianSystem:
    """Assemble the 2n-dimensional wave system with dense operators.

    This is the reference path; `make_wave_rhs` / `make_wave_energy`
    provide equivalent matrix-free evaluation for time stepping.
    """
    n = cfg.n
    lap = build_laplacian(cfg)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    D = SkewOperator(np.block([[zero, eye], [-eye, zero]]))
    Q = np.block([[-lap.matrix, zero], [zero, eye]])
    c = np.concatenate([np.ones(n), np.zeros(n)])
    H = SplitHamiltonian(Q, lambda x: 1.0 - np.cos(x), np.sin, c)
    return HamiltonianSystem(D, H)


def make_wave_rhs(cfg: WaveConfig):
    """Matrix-free right-hand side z -> (v, A u - sin u) for time stepping."""
    n = cfg.n
    A = build_laplacian(cfg).csr

    def f(z):
        u = z[:n]
        v = z[n:]
        return np.concatenate([v, A @ u - np.sin(u)])

    return f


def make_wave_energy(cfg: WaveConfig):
    """Matrix-free Hamiltonian z -> 0.5 v'v - 0.5 u'Au + sum(1 - cos u)."""
    n = cfg.n
    A = build_laplacian(cfg).csr

    def energy(z):
        u = z[:n]
        v = z[n:]
        return float(0.5 * v @ v - 0.5 * u @ (A @ u) + np.sum(1.0 - np.cos(u)))

    return energy
