"""Z3 lattice gauge theory coupled to staggered fermions.

Operators are built as explicit matrices on the full Hilbert space with the
fermion qubit factors leftmost (site 1 most significant) followed by one qutrit
factor per link (link 1 most significant).
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_core import PydanticCustomError

from z3lgt.errors import DimensionError, HermiticityError
from z3lgt.linalg_core import dagger, direct_sum_pad, hermiticity_deviation, kron_all

logger = logging.getLogger(__name__)

OMEGA = np.exp(2j * np.pi / 3)
HERMITIAN_TOL = 1e-12
MAX_SITES = 4

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_Z = np.diag([1.0, -1.0]).astype(np.complex128)
I2 = np.eye(2, dtype=np.complex128)
I3 = np.eye(3, dtype=np.complex128)


class Topology(str, Enum):
    OPEN = "open"
    TRIANGLE = "triangle"


# ---------------------------
# Lattice specification
# ---------------------------

def _topology_error(field: str, message: str) -> PydanticCustomError:
    # model-level errors carry no field loc; ctx names the field instead
    return PydanticCustomError("topology_mismatch", message, {"field": field})


class LatticeSpec(BaseModel):
    """Physical parameters and topology of one Hamiltonian instance."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_sites: int = Field(3, ge=2, le=MAX_SITES)
    n_links: Optional[int] = Field(None, ge=1)
    topology: Topology = Topology.TRIANGLE
    mass: float = 0.0
    coupling: float = 0.15
    chem_potential: float = 0.0
    padding_lambda: float = 1.0
    stagger_offset: int = Field(1, ge=0, le=1)
    include_hopping: bool = True
    # link whose field dresses the wrap-around hop of the triangle
    closing_link: Optional[int] = Field(None, ge=1, le=3)

    @model_validator(mode="after")
    def _check_topology(self) -> "LatticeSpec":
        if self.topology is Topology.OPEN:
            expected = self.n_sites - 1
            if self.n_links is None:
                object.__setattr__(self, "n_links", expected)
            elif self.n_links != expected:
                raise _topology_error("n_links",
                                      f"open chain with {self.n_sites} sites needs n_links={expected}, got {self.n_links}")
            if self.closing_link is not None:
                raise _topology_error("closing_link", "closing_link only applies to the triangle topology")
        else:
            if self.n_links is None:
                object.__setattr__(self, "n_links", 3)
            if self.n_sites != 3:
                raise _topology_error("n_sites", f"triangle needs n_sites=3, got {self.n_sites}")
            if self.n_links != 3:
                raise _topology_error("n_links", f"triangle needs n_links=3, got {self.n_links}")
        return self

    @property
    def physical_dim(self) -> int:
        return 2 ** self.n_sites * 3 ** self.n_links

    def stagger_sign(self, j: int) -> int:
        """Sign of the mass term on 1-based site ``j``."""
        return -1 if (j - 1 + self.stagger_offset) % 2 else 1

    def with_updates(self, **changes) -> "LatticeSpec":
        """Validated copy with some fields replaced."""
        data = self.model_dump()
        data.update(changes)
        return LatticeSpec(**data)


@dataclass(frozen=True)
class ModelOperators:
    fermion_ops: List[np.ndarray]
    link_pos_ops: List[np.ndarray]
    link_field_ops: List[np.ndarray]
    physical_dim: int


# ---------------------------
# Single-factor matrices
# ---------------------------

def clock_x() -> np.ndarray:
    """Link position operator X = diag(-1, 0, 1)."""
    return np.diag([-1.0, 0.0, 1.0]).astype(np.complex128)


def sylvester() -> np.ndarray:
    """The 3x3 Sylvester matrix S conjugating X into the electric field."""
    w, wb = OMEGA, np.conj(OMEGA)
    return np.array([[w, 1, wb], [1, 1, 1], [wb, 1, w]], dtype=np.complex128) / math.sqrt(3)


def clock_p() -> np.ndarray:
    """Electric field operator P = S^dagger X S."""
    s = sylvester()
    return dagger(s) @ clock_x() @ s


def link_phase(coupling: float) -> np.ndarray:
    """Exact exponential exp(i g 2pi/3 X) of the diagonal position operator."""
    theta = coupling * 2 * np.pi / 3
    return np.diag(np.exp(1j * theta * np.diag(clock_x()).real))


# ---------------------------
# Full-space operators
# ---------------------------

def _check_index(name: str, index: int, upper: int) -> None:
    if not 1 <= index <= upper:
        raise DimensionError(f"{name} index {index} out of range 1..{upper}")


def fermion_op(j: int, n_sites: int, n_links: int) -> np.ndarray:
    """Annihilation operator c_j with its diag(1,-1) sign string on sites < j."""
    _check_index("site", j, n_sites)
    factors = [SIGMA_Z] * (j - 1) + [SIGMA_PLUS] + [I2] * (n_sites - j)
    factors.append(np.eye(3 ** n_links, dtype=np.complex128))
    return kron_all(*factors)


def _link_factor(op: np.ndarray, k: int, n_sites: int, n_links: int) -> np.ndarray:
    factors = [np.eye(2 ** n_sites, dtype=np.complex128)]
    factors += [op if q == k else I3 for q in range(1, n_links + 1)]
    return kron_all(*factors)


def link_ops(k: int, n_sites: int, n_links: int) -> Tuple[np.ndarray, np.ndarray]:
    """Position and electric field operators (A_k, E_k) of link ``k``."""
    _check_index("link", k, n_links)
    return (_link_factor(clock_x(), k, n_sites, n_links),
            _link_factor(clock_p(), k, n_sites, n_links))


def build_model_operators(spec: LatticeSpec) -> ModelOperators:
    fermions = [fermion_op(j, spec.n_sites, spec.n_links) for j in range(1, spec.n_sites + 1)]
    links = [link_ops(k, spec.n_sites, spec.n_links) for k in range(1, spec.n_links + 1)]
    return ModelOperators(
        fermion_ops=fermions,
        link_pos_ops=[a for a, _ in links],
        link_field_ops=[e for _, e in links],
        physical_dim=spec.physical_dim,
    )


def hops(spec: LatticeSpec) -> List[Tuple[int, int, int]]:
    """(phase link, head site, tail site) for every hopping term U c_head^dagger c_tail."""
    if spec.topology is Topology.OPEN:
        return [(k, k + 1, k) for k in range(1, spec.n_links + 1)]
    return [(1, 2, 1), (2, 3, 2), (spec.closing_link or 3, 1, 3)]


def number_operator(spec: LatticeSpec) -> np.ndarray:
    """Total fermion number sum_j c_j^dagger c_j."""
    ops = build_model_operators(spec)
    return sum(dagger(c) @ c for c in ops.fermion_ops)


def build_hamiltonian(spec: LatticeSpec) -> np.ndarray:
    """Assemble H = sum 1/2 E^2 + m sum s_j n_j + mu sum n_j + (i/2)(sum U c^dagger c - h.c.).

    Args:
        spec (LatticeSpec): Lattice parameters and topology.

    Returns:
        The physical_dim x physical_dim Hermitian Hamiltonian.
    """
    ops = build_model_operators(spec)
    dim = ops.physical_dim
    h = np.zeros((dim, dim), dtype=np.complex128)

    for e in ops.link_field_ops:
        h += 0.5 * (e @ e)

    for j, c in enumerate(ops.fermion_ops, start=1):
        n = dagger(c) @ c
        h += (spec.mass * spec.stagger_sign(j) + spec.chem_potential) * n

    if spec.include_hopping:
        phase = link_phase(spec.coupling)
        for link, head, tail in hops(spec):
            u = _link_factor(phase, link, spec.n_sites, spec.n_links)
            hop = u @ dagger(ops.fermion_ops[head - 1]) @ ops.fermion_ops[tail - 1]
            h += 0.5j * (hop - dagger(hop))

    deviation = hermiticity_deviation(h)
    if deviation >= HERMITIAN_TOL:
        raise HermiticityError("Assembled Hamiltonian is not Hermitian", deviation)

    logger.info(f"Built {spec.topology.value} Hamiltonian: sites={spec.n_sites} links={spec.n_links} dim={dim}")
    return h


def qubitize(h: np.ndarray, lam: float) -> Tuple[np.ndarray, int]:
    """Pad ``h`` with ``lam * I`` up to the next power of two.

    Returns:
        Tuple of the padded matrix and its qubit count.
    """
    dim = h.shape[0]
    n_qubits = max(1, math.ceil(math.log2(dim)))
    padded = direct_sum_pad(h, 2 ** n_qubits, lam)
    deviation = hermiticity_deviation(padded)
    if deviation >= HERMITIAN_TOL:
        raise HermiticityError("Padded Hamiltonian is not Hermitian", deviation)
    return padded, n_qubits


def safe_padding_lambda(spec: LatticeSpec) -> float:
    """Padding value that keeps the padded block above every physical level during sweeps."""
    return 10.0 * (1.0 + abs(spec.chem_potential) + abs(spec.mass) + 1.0)
