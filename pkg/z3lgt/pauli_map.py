"""Pauli-string decomposition of padded Hamiltonians.

A label has one character per qubit, qubit 0 leftmost and most significant.
Internally a label is the pair of bit masks (x, z) with P = i^{#Y} X^x Z^z,
so that P|b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np
from scipy.linalg import hadamard

from z3lgt.errors import DimensionError, HermiticityError
from z3lgt.linalg_core import as_operator, kron_all

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 1e-12
IMAG_TOL = 1e-12
ALPHABET = "IXYZ"
I_POWERS = np.array([1, 1j, -1, -1j], dtype=np.complex128)

PAULI_MATRICES: Dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True)
class PauliTerm:
    label: str
    coefficient: float

    def __post_init__(self):
        if not self.label or any(ch not in ALPHABET for ch in self.label):
            raise ValueError(f"Invalid Pauli label {self.label!r}")


@dataclass(frozen=True)
class PauliSum:
    n_qubits: int
    terms: Tuple[PauliTerm, ...]

    def __post_init__(self):
        labels = [t.label for t in self.terms]
        if len(set(labels)) != len(labels):
            raise ValueError("PauliSum labels must be unique")
        if any(len(label) != self.n_qubits for label in labels):
            raise DimensionError(f"All labels must have length {self.n_qubits}")
        object.__setattr__(self, "terms", tuple(sorted(self.terms, key=lambda t: t.label)))

    def as_dict(self) -> Dict[str, float]:
        return {t.label: t.coefficient for t in self.terms}


def label_masks(label: str) -> Tuple[int, int, int]:
    n = len(label)
    x = z = ny = 0
    for q, ch in enumerate(label):
        bit = 1 << (n - 1 - q)
        if ch in "XY":
            x |= bit
        if ch in "YZ":
            z |= bit
        if ch == "Y":
            ny += 1
    return x, z, ny


def mask_label(x: int, z: int, n_qubits: int) -> str:
    chars = []
    for q in range(n_qubits):
        bit = 1 << (n_qubits - 1 - q)
        chars.append("IZXY"[(2 if x & bit else 0) + (1 if z & bit else 0)])
    return "".join(chars)


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.int64)
    count = np.zeros_like(a)
    while np.any(a):
        count += a & 1
        a = a >> 1
    return count


def signed_permutation(label: str) -> Tuple[np.ndarray, np.ndarray]:
    """Rows and values of the single nonzero per column of the Pauli string.

    Returns:
        Tuple (rows, values) with P[rows[b], b] = values[b].
    """
    n = len(label)
    x, z, ny = label_masks(label)
    cols = np.arange(2 ** n)
    signs = 1 - 2 * (_popcount(cols & z) & 1)
    return cols ^ x, I_POWERS[ny % 4] * signs


def pauli_matrix(label: str) -> np.ndarray:
    """Dense Kronecker product of the label's single-qubit matrices."""
    return kron_all(*(PAULI_MATRICES[ch] for ch in label))


def _n_qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise DimensionError(f"Pauli decomposition needs a power-of-two dimension >= 2, got {dim}")
    return n


def coefficient_table(h) -> np.ndarray:
    """All 4^n projections Tr(P H) / 2^n indexed as table[x, z].

    Tr(P H) = i^{#Y} sum_b (-1)^{popcount(b & z)} H[b, b ^ x], i.e. one
    Walsh-Hadamard transform per x mask.
    """
    h = as_operator(h)
    dim = h.shape[0]
    n = _n_qubits_of(dim)
    cols = np.arange(dim)
    shifted = h[cols[np.newaxis, :], cols[np.newaxis, :] ^ cols[:, np.newaxis]]
    table = shifted @ hadamard(dim).astype(np.float64)
    xs, zs = np.meshgrid(cols, cols, indexing="ij")
    n_y = _popcount(xs & zs)
    return table * I_POWERS[n_y % 4] / dim


def decompose(h, threshold: float = DEFAULT_THRESHOLD) -> PauliSum:
    """Expand a Hermitian 2^n x 2^n matrix in the Pauli basis.

    Args:
        h: Hermitian matrix with a power-of-two dimension.
        threshold (float): Terms with |coefficient| <= threshold are dropped.

    Returns:
        PauliSum sorted by label.
    """
    h = as_operator(h)
    n = _n_qubits_of(h.shape[0])
    table = coefficient_table(h)
    worst_imag = float(np.max(np.abs(table.imag)))
    if worst_imag >= IMAG_TOL:
        raise HermiticityError("Pauli projection has an imaginary part", worst_imag)

    real = table.real
    xs, zs = np.nonzero(np.abs(real) > threshold)
    terms = [PauliTerm(mask_label(int(x), int(z), n), float(real[x, z])) for x, z in zip(xs, zs)]
    logger.info(f"Decomposed {n}-qubit operator into {len(terms)} Pauli terms (threshold {threshold:g})")
    return PauliSum(n_qubits=n, terms=tuple(terms))


def decompose_brute_force(h, threshold: float = DEFAULT_THRESHOLD) -> PauliSum:
    """Reference decomposition through dense traces, one label at a time."""
    h = as_operator(h)
    n = _n_qubits_of(h.shape[0])
    terms = []
    for chars in itertools.product(ALPHABET, repeat=n):
        label = "".join(chars)
        coeff = np.trace(pauli_matrix(label) @ h) / h.shape[0]
        if abs(coeff.imag) >= IMAG_TOL:
            raise HermiticityError(f"Pauli projection on {label} has an imaginary part", abs(coeff.imag))
        if abs(coeff.real) > threshold:
            terms.append(PauliTerm(label, float(coeff.real)))
    return PauliSum(n_qubits=n, terms=tuple(terms))


def reconstruct(pauli_sum: PauliSum) -> np.ndarray:
    """Dense matrix sum_P c_P P."""
    dim = 2 ** pauli_sum.n_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    cols = np.arange(dim)
    for term in pauli_sum.terms:
        rows, values = signed_permutation(term.label)
        out[rows, cols] += term.coefficient * values
    return out


def term_count(pauli_sum: PauliSum) -> int:
    return len(pauli_sum.terms)


# ---------------------------
# Text serialization
# ---------------------------

def serialize(pauli_sum: PauliSum) -> str:
    """One ``<label> <coefficient>`` line per term, sorted by label."""
    return "".join(f"{t.label} {t.coefficient:.17g}\n" for t in pauli_sum.terms)


def parse(text: str) -> PauliSum:
    terms: List[PauliTerm] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            label, coeff = line.split()
            terms.append(PauliTerm(label, float(coeff)))
        except ValueError as e:
            raise ValueError(f"Malformed Pauli term on line {lineno}: {line!r}") from e
    if not terms:
        raise ValueError("No Pauli terms found")
    return PauliSum(n_qubits=len(terms[0].label), terms=tuple(terms))


def from_terms(items: Iterable[Tuple[str, float]]) -> PauliSum:
    """Build a PauliSum from (label, coefficient) pairs."""
    terms = tuple(PauliTerm(label, float(c)) for label, c in items)
    if not terms:
        raise ValueError("A PauliSum needs at least one term")
    return PauliSum(n_qubits=len(terms[0].label), terms=terms)
