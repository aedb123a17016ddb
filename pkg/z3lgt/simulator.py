"""Statevector simulation of the RyRz hardware-efficient ansatz.

The circuit is an initial [Ry, Rz] rotation layer followed by ``depth``
repetitions of [CX entangler block, Ry, Rz]. Parameters are laid out per
rotation layer as n Ry angles followed by n Rz angles. Qubit 0 is the most
significant tensor factor of the statevector.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import List, Sequence, Tuple

import numpy as np

from z3lgt.errors import DimensionError, HermiticityError
from z3lgt.linalg_core import as_operator
from z3lgt.pauli_map import PauliSum, signed_permutation

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10
IMAG_TOL = 1e-10


class EntanglementMode(str, Enum):
    FULL = "full"
    LINEAR = "linear"


@dataclass(frozen=True)
class Ansatz:
    n_qubits: int
    depth: int
    entanglement: Tuple[Tuple[int, int], ...]
    param_count: int = field(init=False)

    def __post_init__(self):
        if self.n_qubits < 1 or self.depth < 0:
            raise DimensionError(f"Invalid ansatz size n_qubits={self.n_qubits} depth={self.depth}")
        for control, target in self.entanglement:
            if control == target or not (0 <= control < self.n_qubits and 0 <= target < self.n_qubits):
                raise DimensionError(f"Invalid entangler pair ({control}, {target}) for {self.n_qubits} qubits")
        object.__setattr__(self, "param_count", 2 * self.n_qubits * (self.depth + 1))

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def layer_angles(self, params: np.ndarray, layer: int) -> Tuple[np.ndarray, np.ndarray]:
        """(Ry angles, Rz angles) of rotation layer ``layer``."""
        start = 2 * self.n_qubits * layer
        return (params[start:start + self.n_qubits],
                params[start + self.n_qubits:start + 2 * self.n_qubits])


def build_ansatz(n_qubits: int, depth: int, entanglement_mode: EntanglementMode = EntanglementMode.FULL) -> Ansatz:
    """Describe the layered RyRz circuit.

    Args:
        n_qubits (int): Register size.
        depth (int): Number of entangle+rotate repetitions.
        entanglement_mode (EntanglementMode): ``full`` pairs every (i, j) with i < j in
            lexicographic order, ``linear`` pairs (i, i+1).

    Returns:
        Ansatz with 2 * n_qubits * (depth + 1) parameters.
    """
    mode = EntanglementMode(entanglement_mode)
    if mode is EntanglementMode.FULL:
        pairs = tuple(combinations(range(n_qubits), 2))
    else:
        pairs = tuple((i, i + 1) for i in range(n_qubits - 1))
    return Ansatz(n_qubits=n_qubits, depth=depth, entanglement=pairs)


# ---------------------------
# Gates
# ---------------------------

def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _apply_single(psi: np.ndarray, gate: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a 2x2 gate to ``qubit`` of a state reshaped as (2,)*n."""
    psi = np.tensordot(gate, psi, axes=([1], [qubit]))
    return np.moveaxis(psi, 0, qubit)


def cx_permutation(n_qubits: int, pairs: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Index map ``perm`` so that applying the CX sequence is ``psi[perm]``."""
    indices = np.arange(2 ** n_qubits)
    perm = indices.copy()
    for control, target in pairs:
        cbit = 1 << (n_qubits - 1 - control)
        tbit = 1 << (n_qubits - 1 - target)
        # CX is an involution, so new[b] = old[b ^ tbit] whenever the control is set
        step = np.where(indices & cbit, indices ^ tbit, indices)
        perm = perm[step]
    return perm


def _rotation_layer(psi: np.ndarray, ry_angles: np.ndarray, rz_angles: np.ndarray) -> np.ndarray:
    for q, (a, b) in enumerate(zip(ry_angles, rz_angles)):
        psi = _apply_single(psi, rz(b) @ ry(a), q)
    return psi


def prepare_state(ansatz: Ansatz, params) -> np.ndarray:
    """Run the ansatz circuit on |0...0> and return the normalized statevector."""
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (ansatz.param_count,):
        raise DimensionError(f"Expected {ansatz.param_count} parameters, got shape {params.shape}")

    n = ansatz.n_qubits
    psi = np.zeros((2,) * n, dtype=np.complex128)
    psi[(0,) * n] = 1.0
    psi = _rotation_layer(psi, *ansatz.layer_angles(params, 0))

    perm = cx_permutation(n, ansatz.entanglement) if ansatz.entanglement else None
    for layer in range(1, ansatz.depth + 1):
        if perm is not None:
            psi = psi.reshape(-1)[perm].reshape((2,) * n)
        psi = _rotation_layer(psi, *ansatz.layer_angles(params, layer))

    state = psi.reshape(-1)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > NORM_TOL:
        logger.warning(f"Prepared state norm drifted to {norm:.3e}")
    return state


def circuit_diagram(ansatz: Ansatz) -> str:
    """Plain-text gate listing, one gate per line, with parameter indices."""
    lines: List[str] = [f"# RyRz ansatz: {ansatz.n_qubits} qubits, depth {ansatz.depth}, "
                        f"{ansatz.param_count} parameters"]
    for layer in range(ansatz.depth + 1):
        if layer > 0:
            lines += [f"cx q{c} q{t}" for c, t in ansatz.entanglement]
        base = 2 * ansatz.n_qubits * layer
        lines += [f"ry(theta[{base + q}]) q{q}" for q in range(ansatz.n_qubits)]
        lines += [f"rz(theta[{base + ansatz.n_qubits + q}]) q{q}" for q in range(ansatz.n_qubits)]
    return "\n".join(lines) + "\n"


# ---------------------------
# Expectation values
# ---------------------------

def expectation(state, h) -> float:
    """<psi|H|psi> / <psi|psi> for a Hermitian ``h``."""
    h = as_operator(h)
    v = np.asarray(state, dtype=np.complex128)
    if v.shape != (h.shape[0],):
        raise DimensionError(f"State of shape {v.shape} does not match operator dim {h.shape[0]}")
    value = np.vdot(v, h @ v) / np.vdot(v, v).real
    if abs(value.imag) >= IMAG_TOL:
        raise HermiticityError("Expectation value has an imaginary part", abs(value.imag))
    return float(value.real)


def expectation_pauli(state, pauli_sum: PauliSum) -> float:
    """Sum of c_P <psi|P|psi>, evaluated term by term."""
    v = np.asarray(state, dtype=np.complex128)
    if v.shape != (2 ** pauli_sum.n_qubits,):
        raise DimensionError(f"State of shape {v.shape} does not match {pauli_sum.n_qubits} qubits")
    norm = np.vdot(v, v).real
    total = 0.0
    for term in pauli_sum.terms:
        rows, values = signed_permutation(term.label)
        total += term.coefficient * np.vdot(v[rows], values * v).real
    return float(total / norm)
