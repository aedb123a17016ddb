import numpy as np
import pytest
from pydantic import ValidationError

from z3lgt.errors import DimensionError
from z3lgt.linalg_core import anticommutator, commutator, eigh, is_hermitian
from z3lgt.model import (
    LatticeSpec,
    Topology,
    build_hamiltonian,
    build_model_operators,
    clock_p,
    clock_x,
    fermion_op,
    hops,
    link_ops,
    link_phase,
    number_operator,
    qubitize,
    safe_padding_lambda,
    sylvester,
)

UNIT_COUPLING_GROUND = (1 - np.sqrt(5)) / 4


def ground(spec):
    return eigh(build_hamiltonian(spec))[0][0]


# ---------------------------
# Lattice specification
# ---------------------------

def test_spec_defaults_are_the_triangle():
    spec = LatticeSpec()
    assert spec.topology is Topology.TRIANGLE
    assert (spec.n_sites, spec.n_links) == (3, 3)
    assert (spec.coupling, spec.mass, spec.chem_potential, spec.padding_lambda) == (0.15, 0.0, 0.0, 1.0)
    assert spec.physical_dim == 216


def test_open_chain_derives_links():
    assert LatticeSpec(n_sites=2, topology="open").n_links == 1
    assert LatticeSpec(n_sites=4, topology="open").physical_dim == 16 * 27


@pytest.mark.parametrize("kwargs", [
    {"n_sites": 3, "topology": "open", "n_links": 3},
    {"n_sites": 2, "topology": "triangle"},
    {"n_sites": 5, "topology": "open"},
    {"n_sites": 2, "topology": "open", "closing_link": 1},
    {"stagger_offset": 2},
    {"unknown": 1},
])
def test_spec_rejects_invalid_combinations(kwargs):
    with pytest.raises(ValidationError):
        LatticeSpec(**kwargs)


def test_stagger_sign_convention():
    spec = LatticeSpec()
    assert [spec.stagger_sign(j) for j in (1, 2, 3)] == [-1, 1, -1]
    flipped = spec.with_updates(stagger_offset=0)
    assert [flipped.stagger_sign(j) for j in (1, 2, 3)] == [1, -1, 1]


def test_with_updates_revalidates():
    spec = LatticeSpec()
    assert spec.with_updates(chem_potential=0.5).chem_potential == 0.5
    with pytest.raises(ValidationError):
        spec.with_updates(n_sites=2)


# ---------------------------
# Single-link operators
# ---------------------------

def test_clock_x():
    x = clock_x()
    np.testing.assert_allclose(np.linalg.eigvalsh(x), [-1, 0, 1])
    assert is_hermitian(x)
    np.testing.assert_allclose(x @ x, np.diag([1, 0, 1]))


def test_sylvester_is_unitary_and_symmetric():
    s = sylvester()
    np.testing.assert_allclose(s.conj().T @ s, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(s, s.T)


def test_clock_p():
    p = clock_p()
    assert is_hermitian(p)
    np.testing.assert_allclose(np.linalg.eigvalsh(p), [-1, 0, 1], atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(p @ p), [0, 1, 1], atol=1e-12)


def test_link_phase_is_diagonal_unitary():
    u = link_phase(0.15)
    theta = 0.15 * 2 * np.pi / 3
    np.testing.assert_allclose(np.diag(u), np.exp(1j * theta * np.array([-1, 0, 1])))
    np.testing.assert_allclose(link_phase(0.0), np.eye(3))


# ---------------------------
# Full-space operators
# ---------------------------

def test_fermion_op_matches_two_site_layout():
    c1 = fermion_op(1, 2, 1)
    sigma_plus = np.array([[0, 1], [0, 0]])
    np.testing.assert_allclose(c1, np.kron(np.kron(sigma_plus, np.eye(2)), np.eye(3)))
    c2 = fermion_op(2, 2, 1)
    np.testing.assert_allclose(c2, np.kron(np.kron(np.diag([1, -1]), sigma_plus), np.eye(3)))


def test_fermion_anticommutation(three_site_spec):
    ops = build_model_operators(three_site_spec).fermion_ops
    dim = three_site_spec.physical_dim
    for i, ci in enumerate(ops):
        np.testing.assert_allclose(ci @ ci, np.zeros((dim, dim)))
        for j, cj in enumerate(ops):
            expected = np.eye(dim) if i == j else np.zeros((dim, dim))
            np.testing.assert_allclose(ci @ cj.conj().T + cj.conj().T @ ci, expected, atol=1e-12)


def test_link_ops_layout():
    a1, e1 = link_ops(1, 2, 1)
    assert a1.shape == (12, 12)
    np.testing.assert_allclose(a1, np.kron(np.eye(4), clock_x()))
    _, e3 = link_ops(3, 3, 3)
    np.testing.assert_allclose(e3, np.kron(np.eye(72), clock_p()), atol=1e-12)
    a_first, _ = link_ops(1, 3, 2)
    _, e_second = link_ops(2, 3, 2)
    assert is_hermitian(a_first)
    np.testing.assert_allclose(commutator(a_first, e_second), 0, atol=1e-12)


def test_index_errors():
    with pytest.raises(DimensionError):
        fermion_op(3, 2, 1)
    with pytest.raises(DimensionError):
        link_ops(0, 2, 1)


def test_hops():
    assert hops(LatticeSpec(n_sites=3, topology="open")) == [(1, 2, 1), (2, 3, 2)]
    assert hops(LatticeSpec()) == [(1, 2, 1), (2, 3, 2), (3, 1, 3)]
    assert hops(LatticeSpec(closing_link=1))[-1] == (1, 1, 3)


# ---------------------------
# Hamiltonian
# ---------------------------

@pytest.mark.parametrize("kwargs,dim", [
    ({"n_sites": 2, "topology": "open"}, 12),
    ({"n_sites": 3, "topology": "open"}, 72),
    ({}, 216),
])
def test_hamiltonian_shape_and_hermiticity(kwargs, dim):
    h = build_hamiltonian(LatticeSpec(**kwargs))
    assert h.shape == (dim, dim)
    assert is_hermitian(h)


@pytest.mark.parametrize("kwargs,expected", [
    ({"n_sites": 2, "topology": "open", "coupling": 0.15}, -0.4945419751),
    ({"n_sites": 2, "topology": "open", "coupling": 1.0}, UNIT_COUPLING_GROUND),
    ({"n_sites": 3, "topology": "open", "coupling": 0.15}, -0.69930137),
    ({"coupling": 0.15}, -0.8617705241),
    ({"coupling": 0.15, "closing_link": 1}, -0.86375772),
    ({"coupling": 0.0}, -np.sqrt(3) / 2),
    ({"n_sites": 2, "topology": "open", "mass": 1.0}, -1.1167175589),
    ({"n_sites": 3, "topology": "open", "mass": 1.0}, -2.2224225285),
    ({"mass": 1.0}, -2.2332791288),
])
def test_ground_energies(kwargs, expected):
    assert ground(LatticeSpec(**kwargs)) == pytest.approx(expected, abs=1e-7)


def test_hopping_free_occupation_counting():
    spec = LatticeSpec(n_sites=2, topology="open", mass=1.0, include_hopping=False)
    assert ground(spec) == pytest.approx(-1.0, abs=1e-12)


def test_hamiltonian_conserves_particle_number(triangle_spec):
    h = build_hamiltonian(triangle_spec)
    np.testing.assert_allclose(commutator(h, number_operator(triangle_spec)), 0, atol=1e-12)


def test_chemical_potential_shifts_by_particle_number(triangle_spec):
    # H(mu) = H(0) + mu N
    shifted = build_hamiltonian(triangle_spec.with_updates(chem_potential=0.4))
    np.testing.assert_allclose(shifted - build_hamiltonian(triangle_spec),
                               0.4 * number_operator(triangle_spec), atol=1e-12)


@pytest.mark.parametrize("n_sites,topology,dim,qubits", [
    (2, "open", 16, 4),
    (3, "open", 128, 7),
    (3, "triangle", 256, 8),
])
def test_qubitize(n_sites, topology, dim, qubits):
    h = build_hamiltonian(LatticeSpec(n_sites=n_sites, topology=topology))
    padded, n_qubits = qubitize(h, 1.0)
    assert padded.shape == (dim, dim) and n_qubits == qubits
    np.testing.assert_allclose(np.diag(padded)[h.shape[0]:], 1.0)


def test_padding_keeps_physical_ground_state(two_site_spec):
    h = build_hamiltonian(two_site_spec)
    padded, _ = qubitize(h, 1.0)
    assert eigh(padded)[0][0] == pytest.approx(eigh(h)[0][0], abs=1e-12)


def test_safe_padding_lambda():
    spec = LatticeSpec(mass=1.0, chem_potential=2.0)
    assert safe_padding_lambda(spec) == pytest.approx(50.0)
    h = build_hamiltonian(spec)
    assert safe_padding_lambda(spec) > eigh(h)[0][-1]


@pytest.mark.parametrize("seed", range(5))
def test_hamiltonian_is_hermitian_for_random_parameters(physical_system, seed):
    spec, _ = physical_system
    mass, coupling, mu = np.random.default_rng(seed).uniform(-2, 2, 3)
    h = build_hamiltonian(spec.with_updates(mass=mass, coupling=coupling, chem_potential=mu))
    assert is_hermitian(h)


def test_zero_coupling_matches_hand_assembled_two_site_matrix():
    sigma_plus = np.array([[0, 1], [0, 0]])
    c1 = np.kron(np.kron(sigma_plus, np.eye(2)), np.eye(3))
    c2 = np.kron(np.kron(np.diag([1, -1]), sigma_plus), np.eye(3))
    e = np.kron(np.eye(4), clock_p())
    hop = c2.conj().T @ c1
    expected = 0.5 * e @ e + 0.5j * (hop - hop.conj().T)
    h = build_hamiltonian(LatticeSpec(n_sites=2, topology="open", coupling=0.0))
    np.testing.assert_allclose(h, expected, atol=1e-12)


def test_zero_coupling_hopping_drops_the_links(physical_system):
    spec, _ = physical_system
    ops = build_model_operators(spec)
    expected = sum(0.5 * e @ e for e in ops.link_field_ops)
    for _, head, tail in hops(spec):
        hop = ops.fermion_ops[head - 1].conj().T @ ops.fermion_ops[tail - 1]
        expected = expected + 0.5j * (hop - hop.conj().T)
    np.testing.assert_allclose(build_hamiltonian(spec.with_updates(coupling=0.0)), expected, atol=1e-12)


@pytest.mark.parametrize("mass", [-1.3, 0.7, 2.0])
def test_mass_term_trace(physical_system, mass):
    # hopping is traceless and the electric term does not depend on m
    spec, h = physical_system
    shift = np.trace(build_hamiltonian(spec.with_updates(mass=mass))) - np.trace(h)
    signs = sum(spec.stagger_sign(j) for j in range(1, spec.n_sites + 1))
    assert shift.real == pytest.approx(mass * signs * spec.physical_dim / 2, abs=1e-9)
    assert abs(shift.imag) < 1e-12


def test_link_operators_commute(three_site_spec):
    ops = build_model_operators(three_site_spec)
    for i in range(2):
        for j in range(2):
            np.testing.assert_allclose(commutator(ops.link_pos_ops[i], ops.link_pos_ops[j]), 0, atol=1e-12)
            np.testing.assert_allclose(commutator(ops.link_field_ops[i], ops.link_field_ops[j]), 0, atol=1e-12)


def test_fermions_commute_with_links(three_site_spec):
    ops = build_model_operators(three_site_spec)
    for c in ops.fermion_ops:
        for a, e in zip(ops.link_pos_ops, ops.link_field_ops):
            np.testing.assert_allclose(commutator(c, a), 0, atol=1e-12)
            np.testing.assert_allclose(commutator(c, e), 0, atol=1e-12)


def test_distinct_fermions_anticommute(three_site_spec):
    ops = build_model_operators(three_site_spec).fermion_ops
    for i, ci in enumerate(ops):
        for j, cj in enumerate(ops):
            if i != j:
                np.testing.assert_allclose(anticommutator(ci, cj), 0, atol=1e-12)
