"""Matplotlib figures written to files (Agg backend, no display needed)."""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from .circuit import Circuit, Role  # noqa: E402
from .arch import Vertex, used_couplers  # noqa: E402

_ROLE_COLOUR = {Role.CONTROL: "#4c72b0", Role.TARGET: "#c44e52", Role.ANCILLA: "#55a868", Role.GENERIC: "#8172b2"}


def plot_placement(
    g: nx.Graph,
    placements: Sequence[Mapping[str, Vertex]],
    c: Circuit,
    path: str | Path,
    title: str = "",
) -> Path:
    """Draw the coupling grid with one or more placements of ``c``.

    Couplers used by the circuit are drawn thick; idle ones thin and grey.
    """
    path = Path(path)
    w = g.graph.get("width", 1)
    h = g.graph.get("height", 1)
    fig, ax = plt.subplots(figsize=(1.2 * w + 1, 1.2 * h + 1))
    used = set().union(*(used_couplers(c, p) for p in placements)) if placements else set()
    for u, v in g.edges:
        bold = frozenset({u, v}) in used
        ax.plot([u[0], v[0]], [u[1], v[1]], color="black" if bold else "#bbbbbb", lw=3 if bold else 1, zorder=1)
    role = {q.label: q.role for q in c.qubits}
    occupied = {}
    for p in placements:
        for lb, vert in p.items():
            occupied[vert] = lb
    for vert in g.nodes:
        lb = occupied.get(vert)
        colour = _ROLE_COLOUR[role[lb]] if lb else "white"
        ax.scatter([vert[0]], [vert[1]], s=600, color=colour, edgecolors="black", zorder=2)
        if lb:
            ax.text(vert[0], vert[1], lb, ha="center", va="center", color="white", fontsize=9, zorder=3)
    ax.set_xlim(-0.6, w - 0.4)
    ax.set_ylim(h - 0.4, -0.6)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_metrics(rows: Sequence[Mapping[str, object]], keys: Sequence[str], path: str | Path, title: str = "") -> Path:
    """Grouped bar chart: one group per metric, one bar per construction."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(1.4 * len(keys) + 2, 3.5))
    width = 0.8 / max(len(rows), 1)
    for i, row in enumerate(rows):
        xs = [j + i * width for j in range(len(keys))]
        ax.bar(xs, [float(row[k]) for k in keys], width=width, label=str(row["name"]))
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(keys))])
    ax.set_xticklabels(keys, rotation=20)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
