import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_orthonormal, random_skew
from hamrom.core import (
    HamiltonianSystem,
    SkewOperator,
    SplitHamiltonian,
    check_skew,
    eval_gradient,
    eval_hamiltonian,
    rhs,
)

COS_SPLIT = dict(G=lambda x: 1.0 - np.cos(x), g=np.sin)


def quadratic_only(n):
    return SplitHamiltonian(np.eye(n), lambda x: 0.0 * x, lambda x: 0.0 * x, np.zeros(n))


def test_hamiltonian_quadratic_identity():
    ham = quadratic_only(2)
    assert eval_hamiltonian(ham, np.array([1.0, 0.0])) == 0.5


def test_hamiltonian_matches_scalar_loop_oracle(rng):
    n = 5
    m = rng.standard_normal((n, n))
    Q = m + m.T
    c = np.ones(n)
    ham = SplitHamiltonian(Q, **COS_SPLIT, c=c)
    u = rng.standard_normal(n)
    # independent elementwise accumulation
    expected = 0.0
    for i in range(n):
        for j in range(n):
            expected += 0.5 * u[i] * Q[i, j] * u[j]
        expected += 1.0 - np.cos(u[i])
    assert_allclose(eval_hamiltonian(ham, u), expected, rtol=1e-14)


def test_gradient_identity_and_zero_cases():
    ham = quadratic_only(3)
    u = np.array([0.3, -1.2, 2.0])
    assert_allclose(eval_gradient(ham, u), u)
    ham_cos = SplitHamiltonian(np.eye(3), **COS_SPLIT, c=np.ones(3))
    assert_allclose(eval_gradient(ham_cos, np.zeros(3)), np.zeros(3))


def test_gradient_matches_finite_differences(rng):
    n = 8
    m = rng.standard_normal((n, n))
    ham = SplitHamiltonian(m + m.T, **COS_SPLIT, c=rng.standard_normal(n))
    u = rng.standard_normal(n)
    step = 1e-6
    fd = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        fd[i] = (eval_hamiltonian(ham, u + e) - eval_hamiltonian(ham, u - e)) / (2 * step)
    assert_allclose(eval_gradient(ham, u), fd, rtol=1e-6)


def test_gradient_fd_property_across_dimensions(rng):
    for _ in range(50):
        n = int(rng.integers(2, 51))
        m = rng.standard_normal((n, n))
        ham = SplitHamiltonian(m + m.T, **COS_SPLIT, c=rng.standard_normal(n))
        u = rng.standard_normal(n)
        step = 1e-6
        grad = eval_gradient(ham, u)
        idx = int(rng.integers(n))  # one random component per draw keeps this fast
        e = np.zeros(n)
        e[idx] = step
        fd = (eval_hamiltonian(ham, u + e) - eval_hamiltonian(ham, u - e)) / (2 * step)
        assert_allclose(grad[idx], fd, rtol=1e-6, atol=1e-8 * max(1, abs(fd)))


def test_hamiltonian_permutation_invariance(rng):
    n = 7
    m = rng.standard_normal((n, n))
    Q = m + m.T
    c = rng.standard_normal(n)
    u = rng.standard_normal(n)
    perm = rng.permutation(n)
    P = np.eye(n)[perm]
    ham = SplitHamiltonian(Q, **COS_SPLIT, c=c)
    ham_p = SplitHamiltonian(P @ Q @ P.T, **COS_SPLIT, c=P @ c)
    assert_allclose(
        eval_hamiltonian(ham_p, P @ u), eval_hamiltonian(ham, u), rtol=1e-13
    )


def test_rhs_zero_operator_and_oscillator():
    ham = quadratic_only(2)
    system = HamiltonianSystem(SkewOperator(np.zeros((2, 2))), ham)
    assert_allclose(rhs(system, np.array([3.0, -4.0])), np.zeros(2))
    osc = HamiltonianSystem(SkewOperator(np.array([[0.0, 1.0], [-1.0, 0.0]])), ham)
    assert_allclose(rhs(osc, np.array([1.0, 0.0])), np.array([0.0, -1.0]))


def test_check_skew_examples():
    assert check_skew(np.array([[0.0, 1.0], [-1.0, 0.0]]), 1e-14)
    assert not check_skew(np.eye(3), 1e-14)
    with pytest.raises(ValueError):
        check_skew(np.zeros((2, 3)), 1e-14)


def test_check_skew_under_orthonormal_reduction(rng):
    d = random_skew(rng, 12)
    phi = random_orthonormal(rng, 12, 5)
    assert check_skew(phi.T @ d @ phi, 1e-12 * max(1.0, np.max(np.abs(d))))


def test_skew_quadratic_form_vanishes(rng):
    for _ in range(100):
        n = int(rng.integers(2, 20))
        m = random_skew(rng, n)
        w = rng.standard_normal(n)
        bound = 1e-12 * np.linalg.norm(m) * np.linalg.norm(w) ** 2
        assert abs(w @ (m @ w)) <= max(bound, 1e-15)


def test_skew_operator_rejects_non_skew():
    with pytest.raises(ValueError):
        SkewOperator(np.eye(2))
    with pytest.raises(ValueError):
        SkewOperator(np.zeros((2, 3)))


def test_split_hamiltonian_validation():
    with pytest.raises(ValueError):
        SplitHamiltonian(np.array([[0.0, 1.0], [0.0, 0.0]]), **COS_SPLIT, c=np.ones(2))
    with pytest.raises(ValueError):  # g is not the derivative of G
        SplitHamiltonian(np.eye(2), G=lambda x: 1.0 - np.cos(x), g=np.cos, c=np.ones(2))
    with pytest.raises(ValueError):  # weight length mismatch
        SplitHamiltonian(np.eye(2), **COS_SPLIT, c=np.ones(3))


def test_dimension_mismatch_errors():
    ham = quadratic_only(3)
    with pytest.raises(ValueError):
        eval_hamiltonian(ham, np.ones(4))
    with pytest.raises(ValueError):
        eval_gradient(ham, np.ones(2))
