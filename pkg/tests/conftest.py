import numpy as np
import pytest

from qgames.core import DensityOperator, RandomStream, haar_random_state


@pytest.fixture
def rng():
    return RandomStream(20240901)


def random_density(d, stream, rank=None):
    """Generic mixed state: normalized mixture of Haar pure projectors."""
    rank = d if rank is None else rank
    gen = stream.generator
    weights = gen.random(rank)
    weights /= weights.sum()
    mat = np.zeros((d, d), dtype=complex)
    for w in weights:
        psi = haar_random_state(d, stream).amplitudes
        mat += w * np.outer(psi, psi.conj())
    return DensityOperator(mat)
