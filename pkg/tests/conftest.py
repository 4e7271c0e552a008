import numpy as np
import pytest

from catsim.fock import DensityMatrix, FockSpace


def random_density(space: FockSpace, rng: np.random.Generator, support: int | None = None):
    """Ginibre-random density matrix, optionally supported on the first `support` levels."""
    k = space.n_max if support is None else support
    g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    block = g @ g.conj().T
    block /= np.trace(block).real
    full = np.zeros((space.n_max, space.n_max), dtype=complex)
    full[:k, :k] = block
    return DensityMatrix(space, full)


def random_hermitian(n: int, rng: np.random.Generator):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


@pytest.fixture(scope="session")
def space40():
    return FockSpace(40)
