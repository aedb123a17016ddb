"""Artifact writers: CSV, text, JSON summaries, tables and the EOS and convergence plots."""
import json
import logging
import os
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from tabulate import tabulate  # noqa: E402

logger = logging.getLogger(__name__)

# fixed ids so that repeated runs produce the same SVG bytes
plt.rcParams["svg.hashsalt"] = "z3lgt"


def fmt(value: Any) -> str:
    """17 significant digits for floats, plain str otherwise."""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def ensure_dir(path) -> Path:
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path


def write_text(path, text: str) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    with open(path, "w", newline="\n") as f:
        f.write(text)
    logger.info(f"Wrote {path}")
    return path


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return write_text(path, "\n".join(lines) + "\n")


def write_summary(path, payload: Any) -> Path:
    return write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def format_table(rows: List[Sequence[Any]], headers: Sequence[str]) -> str:
    return tabulate(rows, headers=headers, tablefmt="grid", floatfmt=".8f")


def plot_eos(path, mus: Sequence[float], exact: Sequence[float], vqe: Sequence[float]) -> Path:
    """Line chart of ground energy against chemical potential, exact and variational."""
    path = Path(path)
    ensure_dir(path.parent)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(mus, exact, "o-", label="Exact")
    ax.plot(mus, vqe, "s--", label="VQE")
    ax.set_xlabel("Chemical potential $\\mu$")
    ax.set_ylabel("Ground state energy $E_0$")
    ax.set_title("Z3 gauge theory with fermions: equation of state")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path


def plot_convergence(path, trace: Sequence[Sequence[float]], exact: Optional[float] = None) -> Path:
    """Energy of every objective evaluation, with its running minimum and the exact line."""
    path = Path(path)
    ensure_dir(path.parent)
    steps = [int(i) for i, _ in trace]
    energies = [float(e) for _, e in trace]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(steps, energies, "-", alpha=0.5, label="Evaluation")
    ax.plot(steps, np.minimum.accumulate(energies), "-", label="Best so far")
    if exact is not None:
        ax.axhline(exact, color="k", linestyle="--", label="Exact")
    ax.set_xlabel("Objective evaluation")
    ax.set_ylabel("Energy")
    ax.set_title("VQE convergence")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path
