import numpy as np
import pytest

from spinsq import EnsembleShape, QuantumState


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_pure_state(shape: EnsembleShape, rng) -> QuantumState:
    return QuantumState(shape, random_ket(shape.D, rng))


def random_density(dim: int, rng, rank: int | None = None) -> np.ndarray:
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_mixed_state(shape: EnsembleShape, rng, rank=None) -> QuantumState:
    return QuantumState(shape, random_density(shape.D, rng, rank))


def random_product_ket(shape: EnsembleShape, rng) -> np.ndarray:
    psi = random_ket(shape.d, rng)
    for _ in range(shape.N - 1):
        psi = np.kron(psi, random_ket(shape.d, rng))
    return psi


def random_separable_state(shape: EnsembleShape, rng, max_components=None) -> QuantumState:
    """Random mixture of up to 2N random pure product states."""
    k = int(rng.integers(1, (max_components or 2 * shape.N) + 1))
    weights = rng.dirichlet(np.ones(k))
    return QuantumState.mixture(
        shape, [(w, random_product_ket(shape, rng)) for w in weights]
    )


def random_state(shape: EnsembleShape, rng) -> QuantumState:
    """Pure, dense mixed or low-rank mixture, at random."""
    pick = rng.integers(3)
    if pick == 0:
        return random_pure_state(shape, rng)
    if pick == 1:
        return random_mixed_state(shape, rng)
    k = int(rng.integers(2, 5))
    weights = rng.dirichlet(np.ones(k))
    return QuantumState.mixture(
        shape, [(w, random_ket(shape.D, rng)) for w in weights]
    )
