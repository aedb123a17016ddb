"""Z3 lattice gauge theory coupled to staggered fermions, on a simulated quantum computer."""
from z3lgt.errors import ConfigError, ConvergenceError, DimensionError, HermiticityError, NumericalError, Z3Error

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DimensionError",
    "HermiticityError",
    "NumericalError",
    "Z3Error",
]
