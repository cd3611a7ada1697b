import numpy as np
import pytest

from hamrom.wave import WaveConfig, assemble_wave_fom, initial_state


def random_orthonormal(rng, n, r):
    """Random n x r matrix with orthonormal columns."""
    q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return q[:, :r]


def random_skew(rng, n):
    m = rng.standard_normal((n, n))
    return m - m.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def small_wave():
    """Tiny wave system shared by read-only tests."""
    cfg = WaveConfig(n=24)
    return {"cfg": cfg, "fom": assemble_wave_fom(cfg), "z0": initial_state(cfg)}
