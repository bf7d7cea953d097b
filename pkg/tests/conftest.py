import numpy as np
import pytest

from simplex_decomp import find_fiducial, known_fiducial, sic_from_fiducial
from simplex_decomp.sicpovm import Fiducial


def random_density(rng, dim):
    """Random full-rank PSD trace-one matrix (Wishart construction)."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / m.trace()


def random_pure_state(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@pytest.fixture(scope="session")
def registry_sics():
    return {n: sic_from_fiducial(known_fiducial(n)) for n in (2, 3)}


@pytest.fixture(scope="session")
def optimized_sics():
    """SICs for N = 4, 5 from the first succeeding seed in 0..19."""
    out = {}
    for n in (4, 5):
        for seed in range(20):
            result = find_fiducial(n, seed=seed)
            if isinstance(result, Fiducial):
                out[n] = sic_from_fiducial(result)
                break
        else:
            pytest.fail(f"no SIC fiducial found for N = {n} within 20 seeds")
    return out
