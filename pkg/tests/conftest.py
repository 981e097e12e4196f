import numpy as np
import pytest

import polarxfer as px


@pytest.fixture(scope="session")
def baseline_system():
    return px.make_system()


@pytest.fixture(scope="session")
def baseline_decomposition(baseline_system):
    ensemble, cavity = baseline_system
    return px.decompose(ensemble, cavity)


@pytest.fixture(scope="session")
def small_system():
    """4+4 molecules: cheap enough for repeated steady-state solves."""
    return px.make_system(n_donors=4, n_acceptors=4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_uniform_system(n, rabi=0.16, **kwargs):
    """Uniform-profile system with N donors and N acceptors at fixed collective coupling."""
    params = dict(n_donors=n, n_acceptors=n, rabi=rabi, profile="uniform")
    params.update(kwargs)
    return px.make_system(**params)
