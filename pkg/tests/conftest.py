import numpy as np
import pytest
from hypothesis import settings

# property tests replay the same cases on every run
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def random_density(rng, dim, rank=None):
    """Random full- or fixed-rank density matrix."""
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_bipartite(rng, d_a, d_b):
    v = rng.standard_normal((d_a, d_b)) + 1j * rng.standard_normal((d_a, d_b))
    return v / np.linalg.norm(v)
