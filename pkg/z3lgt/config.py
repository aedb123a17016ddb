"""Run configuration: defaults < config file < command-line flags.

Config files are flat ``key=value`` text files (``#`` comments allowed) read with
python-dotenv. Every key maps onto one field of the nested :class:`RunConfig`.
"""
import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_core import PydanticCustomError

from z3lgt.errors import ConfigError
from z3lgt.model import LatticeSpec, Topology, safe_padding_lambda
from z3lgt.pauli_map import DEFAULT_THRESHOLD
from z3lgt.simulator import EntanglementMode
from z3lgt.vqe import VqeSettings

logger = logging.getLogger(__name__)

load_dotenv()

# flat key -> (section, field); section None means a top-level RunConfig field
FLAT_KEYS: Dict[str, Tuple[Optional[str], str]] = {
    "n_sites": ("lattice", "n_sites"),
    "n_links": ("lattice", "n_links"),
    "topology": ("lattice", "topology"),
    "mass": ("lattice", "mass"),
    "coupling": ("lattice", "coupling"),
    "mu": ("lattice", "chem_potential"),
    "padding_lambda": ("lattice", "padding_lambda"),
    "stagger_offset": ("lattice", "stagger_offset"),
    "include_hopping": ("lattice", "include_hopping"),
    "closing_link": ("lattice", "closing_link"),
    "depth": ("ansatz", "depth"),
    "entanglement": ("ansatz", "entanglement"),
    "optimizer": ("vqe", "optimizer"),
    "max_iterations": ("vqe", "max_iterations"),
    "restarts": ("vqe", "restarts"),
    "seed": ("vqe", "seed"),
    "mu_start": ("eos", "mu_start"),
    "mu_end": ("eos", "mu_end"),
    "mu_step": ("eos", "mu_step"),
    "safe_padding": (None, "safe_padding"),
    "with_vqe": (None, "with_vqe"),
    "pauli_threshold": (None, "pauli_threshold"),
    "workers": (None, "workers"),
    "out_dir": (None, "out_dir"),
}


def default_workers() -> int:
    env = os.getenv("Z3LGT_WORKERS")
    return int(env) if env else (os.cpu_count() or 1)


# ---------------------------
# Config models
# ---------------------------

class AnsatzSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    depth: int = Field(3, ge=0)
    entanglement: EntanglementMode = EntanglementMode.FULL


class EosSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    mu_start: float = 0.0
    mu_end: float = 2.0
    mu_step: float = Field(0.1, gt=0)

    @model_validator(mode="after")
    def _check_range(self) -> "EosSettings":
        if self.mu_end < self.mu_start:
            raise PydanticCustomError("range_order", f"mu_end ({self.mu_end}) must be >= mu_start ({self.mu_start})",
                                      {"field": "mu_end"})
        return self

    def grid(self) -> List[float]:
        """Chemical potentials mu_start + i * mu_step up to mu_end inclusive."""
        count = int((self.mu_end - self.mu_start) / self.mu_step + 1e-9) + 1
        return [round(self.mu_start + i * self.mu_step, 12) for i in range(count)]


class RunConfig(BaseModel):
    """Fully resolved settings of one CLI run."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    lattice: LatticeSpec = LatticeSpec()
    ansatz: AnsatzSettings = AnsatzSettings()
    vqe: VqeSettings = VqeSettings()
    eos: EosSettings = EosSettings()
    safe_padding: bool = False
    with_vqe: bool = True
    pauli_threshold: float = Field(DEFAULT_THRESHOLD, ge=0)
    workers: int = Field(default_factory=default_workers, ge=1)
    out_dir: Path = Path("runs")

    @field_validator("pauli_threshold")
    @classmethod
    def _threshold_range(cls, value: float) -> float:
        if value > 1e-8:
            raise ValueError("pauli_threshold above 1e-8 would drop physical terms")
        return value

    def vqe_lambda(self) -> float:
        """Padding value used for the variational run."""
        return safe_padding_lambda(self.lattice) if self.safe_padding else self.lattice.padding_lambda


# ---------------------------
# Parsing
# ---------------------------

def _nest(flat: Mapping[str, Any]) -> Dict[str, Any]:
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        section, name = FLAT_KEYS[key]
        if section is None:
            nested[name] = value
        else:
            nested.setdefault(section, {})[name] = value
    return nested


def _flat_name(error: Mapping[str, Any]) -> str:
    loc = tuple(error["loc"])
    field = (error.get("ctx") or {}).get("field")
    if field is not None:
        loc = loc[:1] + (field,)
    for key, target in FLAT_KEYS.items():
        if tuple(x for x in target if x is not None) == tuple(loc[:2]):
            return key
    return ".".join(str(x) for x in loc) or "config"


def _check_keys(keys, source: str) -> None:
    unknown = [k for k in keys if k not in FLAT_KEYS]
    if unknown:
        raise ConfigError(f"Unknown {source} keys", fields=unknown)


def read_config_file(path) -> Dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    values = dotenv_values(path)
    _check_keys(values, f"config file {path}")
    missing = [k for k, v in values.items() if v is None or v == ""]
    if missing:
        raise ConfigError(f"Config file {path} has keys without values", fields=missing)
    return dict(values)


def parse_config(path=None, overrides: Optional[Mapping[str, Any]] = None,
                 defaults: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Resolve a RunConfig from layered sources.

    Args:
        path: Optional key=value config file.
        overrides: Flag values; ``None`` entries are ignored.
        defaults: Subcommand defaults applied below the file.

    Returns:
        The validated RunConfig.

    Raises:
        ConfigError: unknown keys or invariant violations, naming the fields.
    """
    flat: Dict[str, Any] = {}
    for source, values in (("default", defaults or {}),
                           ("file", read_config_file(path) if path else {}),
                           ("flag", overrides or {})):
        values = {k: v for k, v in values.items() if v is not None}
        _check_keys(values, source)
        flat.update(values)

    try:
        config = RunConfig(**_nest(flat))
    except ValidationError as e:
        fields = [_flat_name(err) for err in e.errors()]
        details = "; ".join(err["msg"] for err in e.errors())
        raise ConfigError(f"Invalid configuration: {details}", fields=fields) from e

    logger.debug(f"Resolved config: {manifest_values(config)}")
    return config


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def manifest_values(config: RunConfig) -> Dict[str, str]:
    """Flat, sorted key=value view of the resolved config."""
    dumped = {
        "lattice": dict(config.lattice),
        "ansatz": dict(config.ansatz),
        "vqe": dict(config.vqe),
        "eos": dict(config.eos),
    }
    out = {}
    for key, (section, name) in FLAT_KEYS.items():
        value = getattr(config, name) if section is None else dumped[section][name]
        if value is not None:
            out[key] = _render(value)
    return dict(sorted(out.items()))


def manifest_text(config: RunConfig) -> str:
    return "".join(f"{k}={v}\n" for k, v in manifest_values(config).items())


def require_topology(config: RunConfig, topology: Topology, action: str) -> None:
    if config.lattice.topology is not topology:
        raise ConfigError(f"{action} requires topology={topology.value}", fields=["topology"])
