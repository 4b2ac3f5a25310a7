"""Coupling graphs, placement checks, grid embedding, tiling and a greedy
SWAP router used as the cost baseline.

Grid vertices are ``(x, y)`` coordinate tuples.  A placement maps circuit
qubit labels to vertices.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping

import networkx as nx

from .circuit import Circuit, Gate, GateKind, Qubit, Role, interaction_graph

Vertex = tuple[int, int]
Placement = dict[str, Vertex]

MAX_EMBED_QUBITS = 8


class ArchError(ValueError):
    pass


def grid(w: int, h: int) -> nx.Graph:
    if w < 1 or h < 1:
        raise ArchError("grid dimensions must be positive")
    g = nx.Graph(kind="grid", width=w, height=h)
    g.add_nodes_from((x, y) for y in range(h) for x in range(w))
    for y in range(h):
        for x in range(w):
            if x + 1 < w:
                g.add_edge((x, y), (x + 1, y))
            if y + 1 < h:
                g.add_edge((x, y), (x, y + 1))
    return g


def line(n: int) -> nx.Graph:
    g = grid(n, 1)
    g.graph["kind"] = "line"
    return g


def parse_arch(spec: str) -> nx.Graph:
    """``grid:WxH`` or ``line:N``."""
    m = re.fullmatch(r"grid:(\d+)x(\d+)", spec.strip())
    if m:
        return grid(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"line:(\d+)", spec.strip())
    if m:
        return line(int(m.group(1)))
    raise ArchError(f"unrecognised architecture {spec!r}; expected grid:WxH or line:N")


@dataclass(frozen=True)
class Violation:
    gate_index: int
    pair: tuple[str, str]
    vertices: tuple[Vertex, Vertex]

    def __str__(self) -> str:
        (a, b), (u, v) = self.pair, self.vertices
        return f"gate #{self.gate_index}: {a}@{u} and {b}@{v} are not coupled"


def _check_placement(c: Circuit, g: nx.Graph, p: Mapping[str, Vertex]) -> None:
    missing = [lb for lb in c.labels if lb not in p]
    if missing:
        raise ArchError(f"placement misses qubits {missing}")
    used = [p[lb] for lb in c.labels]
    if len(set(used)) != len(used):
        raise ArchError("placement is not injective")
    stray = [v for v in used if v not in g]
    if stray:
        raise ArchError(f"placement uses vertices outside the graph: {stray}")


def first_violation(c: Circuit, g: nx.Graph, p: Mapping[str, Vertex]) -> Violation | None:
    _check_placement(c, g, p)
    for i, gate in enumerate(c.gates):
        for u, v in gate.pairs():
            a, b = c.labels[u], c.labels[v]
            if not g.has_edge(p[a], p[b]):
                return Violation(i, (a, b), (p[a], p[b]))
    return None


def is_executable(c: Circuit, g: nx.Graph, p: Mapping[str, Vertex]) -> bool:
    return first_violation(c, g, p) is None


def find_grid_embedding(c: Circuit, g: nx.Graph) -> Placement | None:
    """Lexicographically least injective placement making ``c`` executable.

    Backtracking over qubits in index order, trying vertices in sorted
    order; every already-placed interaction neighbour must be adjacent.
    """
    if c.n > MAX_EMBED_QUBITS:
        raise ArchError(f"embedding search limited to {MAX_EMBED_QUBITS} qubits, got {c.n}")
    if c.n > g.number_of_nodes():
        return None
    ig = interaction_graph(c)
    labels = c.labels
    vertices = sorted(g.nodes)
    need = [sorted((labels.index(nb) for nb in ig[lb] if labels.index(nb) < i)) for i, lb in enumerate(labels)]
    degree = [ig.degree[lb] for lb in labels]
    chosen: list[Vertex] = []
    taken: set[Vertex] = set()

    def place(i: int) -> bool:
        if i == len(labels):
            return True
        for v in vertices:
            if v in taken or g.degree[v] < degree[i]:
                continue
            if all(g.has_edge(chosen[j], v) for j in need[i]):
                chosen.append(v)
                taken.add(v)
                if place(i + 1):
                    return True
                chosen.pop()
                taken.discard(v)
        return False

    if not place(0):
        return None
    return dict(zip(labels, chosen))


def tile(base: Mapping[str, Vertex], host: nx.Graph, block: tuple[int, int] = (3, 2)) -> list[Placement]:
    """Disjoint translates of a ``block``-sized placement across a grid host, row-major."""
    bw, bh = block
    w, h = host.graph.get("width"), host.graph.get("height")
    if w is None or h is None:
        raise ArchError("tiling needs a grid host")
    if w < bw or h < bh:
        raise ArchError(f"host grid {w}x{h} cannot hold a {bw}x{bh} block")
    if any(not (0 <= x < bw and 0 <= y < bh) for x, y in base.values()):
        raise ArchError(f"base placement does not fit in a {bw}x{bh} block")
    tiles = []
    for ty in range(h // bh):
        for tx in range(w // bw):
            tiles.append({lb: (x + tx * bw, y + ty * bh) for lb, (x, y) in base.items()})
    return tiles


# -- routing ----------------------------------------------------------------


@dataclass(frozen=True)
class RoutingResult:
    """Routed circuit over one wire per graph vertex (sorted vertex order).

    Wire ``i`` is physical vertex ``wires[i]``; wires initially hosting a
    circuit qubit carry its label.
    """

    circuit: Circuit
    swap_count: int
    initial: Placement
    final: Placement
    wires: tuple[Vertex, ...]
    permutation: tuple[int, ...]  # state starting on wire i ends on wire permutation[i]

    @property
    def cnot_count_serial(self) -> int:
        """Single-target CNOTs after expanding every SWAP into three CNOTs."""
        plain = sum(len(g.targets) for g in self.circuit.gates if g.kind is GateKind.CX)
        return plain + 3 * self.swap_count


def _best_path(g: nx.Graph, src: Vertex, dst: Vertex) -> list[Vertex]:
    try:
        return min(nx.all_shortest_paths(g, src, dst))
    except nx.NetworkXNoPath:
        raise ArchError(f"no path between {src} and {dst}") from None


def route_greedy(c: Circuit, g: nx.Graph, p0: Mapping[str, Vertex]) -> RoutingResult:
    """Insert SWAPs so every coupled pair is adjacent when it acts.

    Gates are scanned in order.  A non-adjacent pair is fixed by swapping the
    first operand (the CNOT control) along the lexicographically least
    shortest path until it neighbours the second.  A multi-target CNOT whose
    pairs are all adjacent stays one gate; otherwise it is split per target.
    """
    _check_placement(c, g, p0)
    wires = tuple(sorted(g.nodes))
    wire_of_vertex = {v: i for i, v in enumerate(wires)}
    start_label = {v: lb for lb, v in p0.items()}
    role = {q.label: q.role for q in c.qubits}
    qubits = tuple(
        Qubit(start_label[v], role[start_label[v]]) if v in start_label else Qubit(f"v{v[0]}_{v[1]}", Role.GENERIC)
        for v in wires
    )
    pos: dict[str, Vertex] = dict(p0)
    holds = list(range(len(wires)))  # holds[w] = wire whose initial state now sits on w
    out: list[Gate] = []
    swaps = 0

    def wire(lb: str) -> int:
        return wire_of_vertex[pos[lb]]

    def bring_together(a: str, b: str) -> None:
        nonlocal swaps
        path = _best_path(g, pos[a], pos[b])
        for u, v in zip(path, path[1:-1]):
            wu, wv = wire_of_vertex[u], wire_of_vertex[v]
            out.append(Gate(GateKind.SWAP, (wu, wv)))
            swaps += 1
            holds[wu], holds[wv] = holds[wv], holds[wu]
            for lb, at in pos.items():
                if at == u:
                    pos[lb] = v
                elif at == v:
                    pos[lb] = u

    labels = c.labels
    for gate in c.gates:
        names = [labels[q] for q in gate.qubits]
        if gate.kind is GateKind.CX and len(gate.targets) > 1:
            ctrl, *tgts = names
            if all(g.has_edge(pos[ctrl], pos[t]) for t in tgts):
                out.append(Gate(GateKind.CX, tuple(wire(lb) for lb in names), condition=gate.condition))
                continue
            for t in tgts:
                if not g.has_edge(pos[ctrl], pos[t]):
                    bring_together(ctrl, t)
                out.append(Gate(GateKind.CX, (wire(ctrl), wire(t)), condition=gate.condition))
            continue
        if len(names) == 2 and not g.has_edge(pos[names[0]], pos[names[1]]):
            bring_together(names[0], names[1])
        out.append(Gate(gate.kind, tuple(wire(lb) for lb in names), gate.cbit, gate.condition))
    routed = Circuit(qubits, tuple(out), c.num_clbits)
    perm = [0] * len(wires)
    for w, origin in enumerate(holds):
        perm[origin] = w
    return RoutingResult(routed, swaps, dict(p0), dict(pos), wires, tuple(perm))


def placements(c: Circuit, g: nx.Graph) -> Iterator[Placement]:
    """Every injective placement of ``c`` onto ``g``, in lexicographic order."""
    for combo in itertools.permutations(sorted(g.nodes), c.n):
        yield dict(zip(c.labels, combo))


def best_routing(c: Circuit, g: nx.Graph, limit: int = 5040) -> RoutingResult:
    """Embedding if one exists, else the fewest-SWAP greedy routing over
    up to ``limit`` initial placements (lexicographic order)."""
    if c.n > g.number_of_nodes():
        raise ArchError(f"{c.n} qubits do not fit on {g.number_of_nodes()} vertices")
    if c.n <= MAX_EMBED_QUBITS:
        emb = find_grid_embedding(c, g)
        if emb is not None:
            return route_greedy(c, g, emb)
    best = None
    for p in itertools.islice(placements(c, g), limit):
        r = route_greedy(c, g, p)
        if best is None or r.swap_count < best.swap_count:
            best = r
    assert best is not None
    return best


def render_grid(g: nx.Graph, p: Mapping[str, Vertex] | None = None, used: set[frozenset[Vertex]] | None = None) -> str:
    """ASCII drawing; couplers used by the circuit are drawn bold (``===``/``#``)."""
    w, h = g.graph.get("width"), g.graph.get("height")
    if w is None:
        raise ArchError("ASCII rendering needs a grid or line graph")
    label = {v: lb for lb, v in (p or {}).items()}
    used = used or set()
    cell = max([2] + [len(lb) for lb in label.values()])
    rows = []
    for y in range(h):
        row = ""
        for x in range(w):
            row += label.get((x, y), ".").center(cell)
            if x + 1 < w:
                edge = frozenset({(x, y), (x + 1, y)})
                row += " === " if edge in used else " --- "
        rows.append(row.rstrip())
        if y + 1 < h:
            link = ""
            for x in range(w):
                edge = frozenset({(x, y), (x, y + 1)})
                link += ("#" if edge in used else "|").center(cell)
                if x + 1 < w:
                    link += "     "
            rows.append(link.rstrip())
    return "\n".join(rows)


def used_couplers(c: Circuit, p: Mapping[str, Vertex]) -> set[frozenset[Vertex]]:
    ig = interaction_graph(c)
    return {frozenset({p[u], p[v]}) for u, v in ig.edges}
