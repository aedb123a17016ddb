"""Command-line entry point: ``python -m z3lgt.main <subcommand> [flags]``."""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from z3lgt.config import parse_config
from z3lgt.errors import Z3Error
from z3lgt.logging_setup import configure_logging
from z3lgt.model import Topology
from z3lgt.runs import RUNNERS
from z3lgt.simulator import EntanglementMode
from z3lgt.vqe import OptimizerKind

logger = logging.getLogger(__name__)

# subcommand defaults, applied beneath the config file
SUBCOMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "eos": {"mass": 1.0},
}

# argparse dest -> flat config key
FLAG_KEYS = {
    "g": "coupling",
    "m": "mass",
    "mu": "mu",
    "n_sites": "n_sites",
    "n_links": "n_links",
    "topology": "topology",
    "closing_link": "closing_link",
    "depth": "depth",
    "entanglement": "entanglement",
    "optimizer": "optimizer",
    "max_iter": "max_iterations",
    "restarts": "restarts",
    "seed": "seed",
    "padding_lambda": "padding_lambda",
    "safe_padding": "safe_padding",
    "mu_start": "mu_start",
    "mu_end": "mu_end",
    "mu_step": "mu_step",
    "with_vqe": "with_vqe",
    "workers": "workers",
    "out": "out_dir",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="z3lgt",
        description="Z3 lattice gauge theory with staggered fermions: exact diagonalization, "
                    "Pauli mapping, VQE and the finite-density equation of state.",
    )
    parser.add_argument("command", choices=sorted(RUNNERS), help="What to run")
    parser.add_argument("--config", help="key=value config file")

    lattice = parser.add_argument_group("lattice")
    lattice.add_argument("--g", type=float, help="Gauge coupling")
    lattice.add_argument("--m", type=float, help="Fermion mass")
    lattice.add_argument("--mu", type=float, help="Chemical potential")
    lattice.add_argument("--n-sites", type=int)
    lattice.add_argument("--n-links", type=int)
    lattice.add_argument("--topology", choices=[t.value for t in Topology])
    lattice.add_argument("--closing-link", type=int, help="Link that dresses the closing hop of the triangle")
    padding = lattice.add_mutually_exclusive_group()
    padding.add_argument("--lambda", dest="padding_lambda", type=float, help="Padding eigenvalue")
    padding.add_argument("--safe-padding", action="store_const", const=True, default=None,
                         help="Pad far above the physical spectrum")

    ansatz = parser.add_argument_group("ansatz and optimizer")
    ansatz.add_argument("--depth", type=int)
    ansatz.add_argument("--entanglement", choices=[e.value for e in EntanglementMode])
    ansatz.add_argument("--optimizer", choices=[o.value for o in OptimizerKind])
    ansatz.add_argument("--max-iter", type=int)
    ansatz.add_argument("--restarts", type=int)
    ansatz.add_argument("--seed", type=int)

    eos = parser.add_argument_group("equation of state")
    eos.add_argument("--mu-start", type=float)
    eos.add_argument("--mu-end", type=float)
    eos.add_argument("--mu-step", type=float)
    eos.add_argument("--no-vqe", dest="with_vqe", action="store_const", const=False, default=None,
                     help="Exact energies only (eos, tables)")

    run = parser.add_argument_group("run")
    run.add_argument("--workers", type=int, help="Process pool size")
    run.add_argument("--out", help="Output directory")
    run.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: getattr(args, dest) for dest, key in FLAG_KEYS.items() if getattr(args, dest) is not None}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        config = parse_config(args.config, overrides_from_args(args), SUBCOMMAND_DEFAULTS.get(args.command))
        logger.info(f"Running {args.command} with output in {config.out_dir}")
        RUNNERS[args.command](config)
    except Z3Error as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
