"""Variational Quantum Eigensolver loop on the statevector simulator."""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import minimize as scipy_minimize

from z3lgt.errors import DimensionError
from z3lgt.linalg_core import as_operator
from z3lgt.simulator import Ansatz, expectation, prepare_state

logger = logging.getLogger(__name__)

SHIFT = math.pi / 2
GRADIENT_TOL = 1e-6
CONVERGED_GRADIENT = 1e-4
PLATEAU_DELTA = 1e-9
PLATEAU_STEPS = 5


class OptimizerKind(str, Enum):
    QUASI_NEWTON = "quasi-newton"
    NELDER_MEAD = "nelder-mead"
    SLSQP = "slsqp"


SCIPY_METHODS = {
    OptimizerKind.QUASI_NEWTON: "BFGS",
    OptimizerKind.NELDER_MEAD: "Nelder-Mead",
    OptimizerKind.SLSQP: "SLSQP",
}


class VqeSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    optimizer: OptimizerKind = OptimizerKind.QUASI_NEWTON
    max_iterations: int = Field(600, ge=1)
    restarts: int = Field(5, ge=1)
    seed: int = Field(1234, ge=0)


class VqeResult(BaseModel):
    """Best-of-restarts VQE outcome; ``trace`` belongs to the winning restart."""

    energy: float
    optimal_params: List[float]
    trace: List[Tuple[int, float]]
    evaluations: int
    gradient_evaluations: int
    restarts_used: int
    seed: int
    converged: bool
    gradient_norm: float
    restart_energies: List[float]


# ---------------------------
# Objective and gradient
# ---------------------------

def energy(h, ansatz: Ansatz, params) -> float:
    return expectation(prepare_state(ansatz, params), h)


def gradient(h, ansatz: Ansatz, params) -> np.ndarray:
    """Parameter-shift gradient [E(t_k + pi/2) - E(t_k - pi/2)] / 2.

    Exact because every Ry/Rz generator squares to the identity.
    """
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (ansatz.param_count,):
        raise DimensionError(f"Expected {ansatz.param_count} parameters, got shape {params.shape}")
    grad = np.empty_like(params)
    shifted = params.copy()
    for k in range(params.size):
        shifted[k] = params[k] + SHIFT
        plus = energy(h, ansatz, shifted)
        shifted[k] = params[k] - SHIFT
        minus = energy(h, ansatz, shifted)
        shifted[k] = params[k]
        grad[k] = 0.5 * (plus - minus)
    return grad


class EnergyObjective:
    """Traced energy function handed to the classical optimizer."""

    def __init__(self, h, ansatz: Ansatz):
        self.h = as_operator(h)
        self.ansatz = ansatz
        if self.h.shape[0] != ansatz.dim:
            raise DimensionError(f"Hamiltonian dim {self.h.shape[0]} does not match {ansatz.n_qubits}-qubit ansatz")
        self.trace: List[Tuple[int, float]] = []
        self.best_energy = math.inf
        self.best_params: Optional[np.ndarray] = None
        self.gradient_evaluations = 0
        self._seen: Dict[bytes, float] = {}

    def __call__(self, params) -> float:
        params = np.asarray(params, dtype=np.float64)
        value = energy(self.h, self.ansatz, params)
        self.trace.append((len(self.trace), value))
        self._seen[params.tobytes()] = value
        if value < self.best_energy:
            self.best_energy = value
            self.best_params = params.copy()
        return value

    def gradient(self, params) -> np.ndarray:
        self.gradient_evaluations += 1
        return gradient(self.h, self.ansatz, params)

    def lookup(self, params) -> float:
        """Energy at ``params``, reusing an earlier evaluation when there is one."""
        params = np.asarray(params, dtype=np.float64)
        key = params.tobytes()
        if key not in self._seen:
            self._seen[key] = energy(self.h, self.ansatz, params)
        return self._seen[key]


class PlateauStop:
    """Optimizer callback that halts after consecutive steps with negligible |dE|."""

    def __init__(self, objective: EnergyObjective, delta: float = PLATEAU_DELTA, steps: int = PLATEAU_STEPS):
        self.objective = objective
        self.delta = delta
        self.steps = steps
        self.previous: Optional[float] = None
        self.previous_x: Optional[np.ndarray] = None
        self.flat = 0
        self.iterations = 0

    def __call__(self, xk) -> None:
        self.iterations += 1
        xk = np.asarray(xk, dtype=np.float64)
        # a simplex iteration that keeps its best vertex is not an accepted step
        if self.previous_x is not None and np.array_equal(xk, self.previous_x):
            return
        self.previous_x = xk.copy()
        current = self.objective.lookup(xk)
        if self.previous is not None and abs(current - self.previous) < self.delta:
            self.flat += 1
        else:
            self.flat = 0
        self.previous = current
        logger.debug(f"iteration {self.iterations}: energy={current:.12f}")
        if self.flat >= self.steps:
            raise StopIteration


# ---------------------------
# Restarts
# ---------------------------

@dataclass
class RestartOutcome:
    index: int
    energy: float
    params: np.ndarray
    trace: List[Tuple[int, float]]
    gradient_evaluations: int
    gradient_norm: float


def initial_point(ansatz: Ansatz, seed: int, restart: int) -> np.ndarray:
    """Uniform draw from [-pi, pi) using the restart's own generator."""
    rng = np.random.default_rng(seed + restart)
    return rng.uniform(-math.pi, math.pi, size=ansatz.param_count)


def _optimizer_options(settings: VqeSettings) -> Dict[str, float]:
    if settings.optimizer is OptimizerKind.QUASI_NEWTON:
        return {"maxiter": settings.max_iterations, "gtol": GRADIENT_TOL}
    if settings.optimizer is OptimizerKind.NELDER_MEAD:
        return {"maxiter": settings.max_iterations, "xatol": 1e-8, "fatol": 1e-10}
    return {"maxiter": settings.max_iterations, "ftol": 1e-12}


def run_restart(h, ansatz: Ansatz, settings: VqeSettings, restart: int) -> RestartOutcome:
    """One seeded optimization from a random initial point."""
    objective = EnergyObjective(h, ansatz)
    x0 = initial_point(ansatz, settings.seed, restart)
    jac = None if settings.optimizer is OptimizerKind.NELDER_MEAD else objective.gradient
    try:
        scipy_minimize(
            objective,
            x0,
            jac=jac,
            method=SCIPY_METHODS[settings.optimizer],
            callback=PlateauStop(objective),
            options=_optimizer_options(settings),
        )
    except StopIteration:
        # optimizers without native halt support surface the callback's signal
        pass

    best = objective.best_params if objective.best_params is not None else x0
    final_energy = objective(best)
    grad_norm = float(np.max(np.abs(gradient(objective.h, ansatz, best))))
    logger.info(f"Restart {restart}: energy={final_energy:.10f} evaluations={len(objective.trace)} "
                f"gradient_norm={grad_norm:.2e}")
    return RestartOutcome(
        index=restart,
        energy=final_energy,
        params=best,
        trace=objective.trace,
        gradient_evaluations=objective.gradient_evaluations,
        gradient_norm=grad_norm,
    )


def _run_restart_job(args) -> RestartOutcome:
    return run_restart(*args)


def minimize(h, ansatz: Ansatz, settings: VqeSettings = VqeSettings(), workers: int = 1) -> VqeResult:
    """Minimize <psi(theta)|H|psi(theta)> over the ansatz parameters.

    Args:
        h: Padded Hermitian Hamiltonian of dimension 2^n_qubits.
        ansatz (Ansatz): Circuit description.
        settings (VqeSettings): Optimizer, iteration budget, restarts and seed.
        workers (int): Process pool bound for independent restarts.

    Returns:
        VqeResult of the lowest-energy restart (ties go to the lowest index).
    """
    h = as_operator(h)
    if h.shape[0] != ansatz.dim:
        raise DimensionError(f"Hamiltonian dim {h.shape[0]} does not match {ansatz.n_qubits}-qubit ansatz")

    jobs = [(h, ansatz, settings, r) for r in range(settings.restarts)]
    if workers > 1 and settings.restarts > 1:
        with ProcessPoolExecutor(max_workers=min(workers, settings.restarts)) as pool:
            outcomes = list(pool.map(_run_restart_job, jobs))
    else:
        outcomes = [_run_restart_job(job) for job in jobs]

    best = min(outcomes, key=lambda o: (o.energy, o.index))
    return VqeResult(
        energy=best.energy,
        optimal_params=[float(p) for p in best.params],
        trace=best.trace,
        evaluations=len(best.trace),
        gradient_evaluations=best.gradient_evaluations,
        restarts_used=len(outcomes),
        seed=settings.seed,
        converged=best.gradient_norm < CONVERGED_GRADIENT,
        gradient_norm=best.gradient_norm,
        restart_energies=[o.energy for o in outcomes],
    )
