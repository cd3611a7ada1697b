"""Finite-dimensional Hamiltonian ODE systems with split Hamiltonians.

A system has the form

    du/dt = D * grad H(u),    D skew-symmetric,

with the Hamiltonian stored in split form

    H(u) = 0.5 * u^T Q u + sum_i c_i * G(u_i),

where Q is a constant symmetric matrix, G is an elementwise scalar
nonlinearity with derivative g = G', and c is a weight vector.  The
gradient is then Q u + c * g(u); the diagonal Jacobian of the nonlinear
part is never materialized.

All objects are immutable after construction and all operations are pure.
"""

import numpy as np

__all__ = [
    "SkewOperator",
    "SplitHamiltonian",
    "HamiltonianSystem",
    "check_skew",
    "eval_hamiltonian",
    "eval_gradient",
    "rhs",
]


def check_skew(matrix, tol):
    """Return True iff ||M^T + M||_max <= tol.

    Raises ValueError if the matrix is not square.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return float(np.max(np.abs(m + m.T))) <= tol


def _as_vector(u, n, what="state"):
    u = np.asarray(u, dtype=float)
    if u.shape != (n,):
        raise ValueError(f"{what} has shape {u.shape}, expected ({n},)")
    return u


class SkewOperator:
    """Constant skew-symmetric coefficient matrix of a Hamiltonian ODE."""

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if not check_skew(m, 1e-12 * scale):
            raise ValueError("matrix is not skew-symmetric within tolerance")
        self.matrix = m
        self.dim = m.shape[0]

    def apply(self, u):
        return self.matrix @ _as_vector(u, self.dim)


class SplitHamiltonian:
    """Split Hamiltonian H(u) = 0.5 u^T Q u + sum_i c_i G(u_i).

    Parameters
    ----------
    Q : (n, n) array_like
        Symmetric quadratic part.
    G : callable
        Elementwise scalar nonlinearity, vectorized over numpy arrays.
    g : callable
        Derivative of G, also vectorized.  Spot-checked against central
        finite differences of G at construction.
    c : (n,) array_like
        Weight vector of the nonlinear part.
    """

    def __init__(self, Q, G, g, c, check_derivative=True):
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError(f"Q must be square, got shape {Q.shape}")
        if float(np.max(np.abs(Q - Q.T))) > 1e-12:
            raise ValueError("Q is not symmetric within 1e-12")
        c = np.asarray(c, dtype=float)
        if c.shape != (Q.shape[0],):
            raise ValueError(
                f"weight vector has shape {c.shape}, expected ({Q.shape[0]},)"
            )
        if check_derivative:
            _check_elementwise_derivative(G, g)
        self.Q = Q
        self.G = G
        self.g = g
        self.c = c
        self.dim = Q.shape[0]


def _check_elementwise_derivative(G, g, step=1e-6):
    # Cheap guard against passing a g that is not G'; sample points are
    # fixed so construction stays deterministic.
    pts = np.linspace(-0.9, 1.1, 7)
    fd = (np.asarray(G(pts + step)) - np.asarray(G(pts - step))) / (2.0 * step)
    gv = np.asarray(g(pts), dtype=float) * np.ones_like(pts)
    if not np.allclose(fd, gv, rtol=1e-5, atol=1e-7):
        raise ValueError("g does not match the finite-difference derivative of G")


class HamiltonianSystem:
    """Pair of a skew operator D and a split Hamiltonian of equal dimension."""

    def __init__(self, D: SkewOperator, H: SplitHamiltonian):
        if D.dim != H.dim:
            raise ValueError(f"dimension mismatch: D is {D.dim}, H is {H.dim}")
        self.D = D
        self.H = H
        self.dim = D.dim


def eval_hamiltonian(ham: SplitHamiltonian, u) -> float:
    """Evaluate H(u) = 0.5 u^T Q u + sum_i c_i G(u_i)."""
    u = _as_vector(u, ham.dim)
    return float(0.5 * u @ (ham.Q @ u) + ham.c @ ham.G(u))


def eval_gradient(ham: SplitHamiltonian, u) -> np.ndarray:
    """Evaluate grad H(u) = Q u + c * g(u)."""
    u = _as_vector(u, ham.dim)
    return ham.Q @ u + ham.c * ham.g(u)


def rhs(system: HamiltonianSystem, u) -> np.ndarray:
    """Right-hand side D * grad H(u) of the Hamiltonian ODE."""
    return system.D.matrix @ eval_gradient(system.H, u)
