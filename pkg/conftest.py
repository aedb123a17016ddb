import numpy as np
import pytest

from z3lgt.config import parse_config
from z3lgt.model import LatticeSpec, Topology, build_hamiltonian, qubitize


@pytest.fixture(scope="session")
def two_site_spec():
    return LatticeSpec(n_sites=2, topology=Topology.OPEN, coupling=0.15)


@pytest.fixture(scope="session")
def three_site_spec():
    return LatticeSpec(n_sites=3, topology=Topology.OPEN, coupling=0.15)


@pytest.fixture(scope="session")
def triangle_spec():
    return LatticeSpec()


@pytest.fixture(scope="session")
def two_site_padded(two_site_spec):
    padded, _ = qubitize(build_hamiltonian(two_site_spec), 1.0)
    return padded


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def small_config(tmp_path):
    """Cheap single-worker config writing into a temporary directory."""
    def make(**overrides):
        values = {"restarts": 1, "max_iterations": 50, "workers": 1, "out_dir": str(tmp_path / "run")}
        values.update(overrides)
        return parse_config(overrides=values)
    return make


SYSTEMS = {
    "one-link": {"n_sites": 2, "topology": "open"},
    "two-link": {"n_sites": 3, "topology": "open"},
    "triangle": {},
}


@pytest.fixture(scope="session", params=list(SYSTEMS), ids=list(SYSTEMS))
def physical_system(request):
    """(spec, unpadded Hamiltonian) for each of the three lattices."""
    spec = LatticeSpec(**SYSTEMS[request.param])
    return spec, build_hamiltonian(spec)


@pytest.fixture(scope="session")
def padded_system(physical_system):
    padded, _ = qubitize(physical_system[1], 1.0)
    return padded


@pytest.fixture
def random_states(rng):
    """Normalized complex Gaussian states, one per row."""
    def make(dim, count=20):
        states = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
        return states / np.linalg.norm(states, axis=1, keepdims=True)
    return make
