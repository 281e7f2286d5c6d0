import numpy as np
import pytest

from qmc.linalg import rng_from


@pytest.fixture
def rng():
    return rng_from(1234)


def random_hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g + g.conj().T


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)
