import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def bell_state():
    return 0.5 * np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]], dtype=complex)


def random_coherent_gambles(rng, n, k=None):
    """Gambles strictly desirable for some random interior state."""
    from qdesire import linalg
    k = int(rng.integers(1, 4)) if k is None else k
    rho0 = linalg.random_density(n, rng)
    out = []
    for _ in range(k):
        g = linalg.random_hermitian(n, rng)
        out.append(g - (np.trace(g @ rho0).real - rng.uniform(0.05, 0.5)) * np.eye(n))
    return out, rho0
