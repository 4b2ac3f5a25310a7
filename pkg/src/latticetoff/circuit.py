"""Circuit IR over role-labelled qubits, ASAP layering and cost metrics.

A multi-target CNOT (one control fanning out to several targets) is a single
gate that occupies its control and all of its targets for one time step.
Qubit 0 is the most significant bit of a basis index everywhere in the
package.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

import networkx as nx


class CircuitError(ValueError):
    pass


class NotInvertibleError(CircuitError):
    pass


class GateKind(str, Enum):
    H = "h"
    X = "x"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    CZ = "cz"
    SWAP = "swap"
    CX = "cx"
    MEASURE_Z = "measure_z"
    MEASURE_X = "measure_x"


SINGLE_QUBIT = frozenset({GateKind.H, GateKind.X, GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG})
MEASUREMENTS = frozenset({GateKind.MEASURE_Z, GateKind.MEASURE_X})
_DAGGER = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S, GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T}


class Role(str, Enum):
    CONTROL = "control"
    TARGET = "target"
    ANCILLA = "ancilla"
    GENERIC = "generic"


def infer_role(label: str) -> Role:
    if re.fullmatch(r"c\d+", label):
        return Role.CONTROL
    if label == "t":
        return Role.TARGET
    if re.fullmatch(r"a\d+", label) or label == "g":
        return Role.ANCILLA
    return Role.GENERIC


@dataclass(frozen=True)
class Qubit:
    label: str
    role: Role = Role.GENERIC


@dataclass(frozen=True)
class Gate:
    """One operation.

    For ``CX`` the operands are ``(control, *targets)``.  ``cbit`` is the
    classical destination of a measurement; ``condition`` names a classical
    bit that must read 1 for the gate to fire.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    cbit: int | None = None
    condition: int | None = None

    def __post_init__(self) -> None:
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(self.qubits))
        q = self.qubits
        if kind in SINGLE_QUBIT or kind in MEASUREMENTS:
            arity_ok = len(q) == 1
        elif kind in (GateKind.CZ, GateKind.SWAP):
            arity_ok = len(q) == 2
        else:
            arity_ok = len(q) >= 2
        if not arity_ok:
            raise CircuitError(f"{kind.value} given {len(q)} operands")
        if len(set(q)) != len(q):
            raise CircuitError(f"{kind.value} has repeated operands {q}")
        if (kind in MEASUREMENTS) != (self.cbit is not None):
            raise CircuitError("measurements, and only measurements, carry a classical destination")
        if self.condition is not None and kind in MEASUREMENTS:
            raise CircuitError("conditional measurement is not supported")

    @property
    def is_measurement(self) -> bool:
        return self.kind in MEASUREMENTS

    @property
    def is_t(self) -> bool:
        return self.kind in (GateKind.T, GateKind.TDG)

    @property
    def control(self) -> int:
        return self.qubits[0]

    @property
    def targets(self) -> tuple[int, ...]:
        return self.qubits[1:]

    def pairs(self) -> list[tuple[int, int]]:
        """Two-qubit couplings this gate needs, as (first, second) index pairs."""
        if self.kind is GateKind.CX:
            return [(self.control, t) for t in self.targets]
        if self.kind in (GateKind.CZ, GateKind.SWAP):
            return [self.qubits]
        return []

    def dagger(self) -> Gate:
        if self.is_measurement:
            raise NotInvertibleError("measurement has no inverse")
        return Gate(_DAGGER.get(self.kind, self.kind), self.qubits, condition=self.condition)

    def remap(self, mapping: Sequence[int] | dict[int, int]) -> Gate:
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.cbit, self.condition)


@dataclass(frozen=True)
class Circuit:
    qubits: tuple[Qubit, ...]
    gates: tuple[Gate, ...] = ()
    num_clbits: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "gates", tuple(self.gates))
        labels = [q.label for q in self.qubits]
        if len(set(labels)) != len(labels):
            raise CircuitError(f"duplicate qubit labels in {labels}")
        n = len(self.qubits)
        for g in self.gates:
            if any(not 0 <= q < n for q in g.qubits):
                raise CircuitError(f"operand out of range in {g}")
            for bit in (g.cbit, g.condition):
                if bit is not None and not 0 <= bit < self.num_clbits:
                    raise CircuitError(f"classical bit {bit} out of range in {g}")

    @classmethod
    def from_labels(cls, labels: Iterable[str], gates: Iterable[Gate] = (), num_clbits: int = 0) -> Circuit:
        return cls(tuple(Qubit(lb, infer_role(lb)) for lb in labels), tuple(gates), num_clbits)

    @property
    def n(self) -> int:
        return len(self.qubits)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(q.label for q in self.qubits)

    def index(self, label: str | int) -> int:
        if isinstance(label, int):
            return label
        try:
            return self.labels.index(label)
        except ValueError:
            raise CircuitError(f"no qubit labelled {label!r}") from None

    @property
    def ancillae(self) -> tuple[int, ...]:
        return tuple(i for i, q in enumerate(self.qubits) if q.role is Role.ANCILLA)

    @property
    def has_measurement(self) -> bool:
        return any(g.is_measurement for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def with_gates(self, gates: Iterable[Gate]) -> Circuit:
        return Circuit(self.qubits, tuple(gates), self.num_clbits)

    def then(self, other: Circuit) -> Circuit:
        """Concatenate two circuits on the same register."""
        if other.qubits != self.qubits:
            raise CircuitError("cannot concatenate circuits over different registers")
        return Circuit(self.qubits, self.gates + other.gates, max(self.num_clbits, other.num_clbits))


class CircuitBuilder:
    """Mutable helper that accumulates gates by qubit label or index."""

    def __init__(self, labels: Iterable[str] | Sequence[Qubit], num_clbits: int = 0):
        qubits = []
        for q in labels:
            qubits.append(q if isinstance(q, Qubit) else Qubit(q, infer_role(q)))
        self._qubits = tuple(qubits)
        self._labels = [q.label for q in qubits]
        self._gates: list[Gate] = []
        self.num_clbits = num_clbits

    @property
    def qubits(self) -> tuple[Qubit, ...]:
        return self._qubits

    def _idx(self, q: str | int) -> int:
        if isinstance(q, int):
            return q
        try:
            return self._labels.index(q)
        except ValueError:
            raise CircuitError(f"no qubit labelled {q!r}") from None

    def add(self, kind: GateKind | str, *qubits: str | int, cbit: int | None = None,
            condition: int | None = None) -> CircuitBuilder:
        self._gates.append(Gate(GateKind(kind), tuple(self._idx(q) for q in qubits), cbit, condition))
        return self

    def h(self, q): return self.add(GateKind.H, q)
    def x(self, q): return self.add(GateKind.X, q)
    def z(self, q): return self.add(GateKind.Z, q)
    def s(self, q): return self.add(GateKind.S, q)
    def sdg(self, q): return self.add(GateKind.SDG, q)
    def t(self, q): return self.add(GateKind.T, q)
    def tdg(self, q): return self.add(GateKind.TDG, q)

    def cx(self, control, *targets) -> CircuitBuilder:
        return self.add(GateKind.CX, control, *targets)

    def cz(self, a, b, condition: int | None = None) -> CircuitBuilder:
        return self.add(GateKind.CZ, a, b, condition=condition)

    def swap(self, a, b) -> CircuitBuilder:
        return self.add(GateKind.SWAP, a, b)

    def measure(self, q, cbit: int, basis: str = "z") -> CircuitBuilder:
        kind = GateKind.MEASURE_Z if basis == "z" else GateKind.MEASURE_X
        self.num_clbits = max(self.num_clbits, cbit + 1)
        return self.add(kind, q, cbit=cbit)

    def extend(self, gates: Iterable[Gate]) -> CircuitBuilder:
        self._gates.extend(gates)
        return self

    def build(self) -> Circuit:
        return Circuit(self._qubits, tuple(self._gates), self.num_clbits)


@dataclass(frozen=True)
class Schedule:
    layers: tuple[tuple[Gate, ...], ...]

    def __len__(self) -> int:
        return len(self.layers)

    def flatten(self) -> list[Gate]:
        return [g for layer in self.layers for g in layer]


def asap_schedule(c: Circuit) -> Schedule:
    """Greedy as-soon-as-possible layering.

    Each gate lands one layer after the latest layer touching any of its
    qubits (or the classical bit it reads/writes).  Gates inside a layer are
    ordered by their lowest qubit index.
    """
    qubit_ready = [0] * c.n
    cbit_ready = [0] * c.num_clbits
    placed: list[list[Gate]] = []
    for g in c.gates:
        level = max(qubit_ready[q] for q in g.qubits)
        for bit in (g.cbit, g.condition):
            if bit is not None:
                level = max(level, cbit_ready[bit])
        if level == len(placed):
            placed.append([])
        placed[level].append(g)
        for q in g.qubits:
            qubit_ready[q] = level + 1
        for bit in (g.cbit, g.condition):
            if bit is not None:
                cbit_ready[bit] = level + 1
    return Schedule(tuple(tuple(sorted(layer, key=lambda g: min(g.qubits))) for layer in placed))


def t_depth(c: Circuit) -> int:
    """Largest number of T/Tdg gates on any dependency path.

    This is the fewest T layers over all valid schedules of the gate list,
    so a T gate on an otherwise idle wire never inflates the count.
    """
    level = [0] * c.n
    cbit_level = [0] * c.num_clbits
    best = 0
    for g in c.gates:
        here = max(level[q] for q in g.qubits)
        for bit in (g.cbit, g.condition):
            if bit is not None:
                here = max(here, cbit_level[bit])
        if g.is_t:
            here += 1
        for q in g.qubits:
            level[q] = here
        for bit in (g.cbit, g.condition):
            if bit is not None:
                cbit_level[bit] = here
        best = max(best, here)
    return best


def serial_depth(c: Circuit) -> int:
    """Depth when every fan-out runs as its CNOT sequence, in place.

    A gate holds all of its qubits (and classical bit) for one step per
    control-target pair, so a k-target CNOT costs k steps.  Because this
    only lengthens gates of the multi-target schedule, it is never below
    ``depth_multi``.
    """
    qubit_ready = [0] * c.n
    cbit_ready = [0] * c.num_clbits
    end = 0
    for g in c.gates:
        start = max(qubit_ready[q] for q in g.qubits)
        bits = [b for b in (g.cbit, g.condition) if b is not None]
        start = max([start] + [cbit_ready[b] for b in bits])
        finish = start + (len(g.targets) if g.kind is GateKind.CX else 1)
        for q in g.qubits:
            qubit_ready[q] = finish
        for b in bits:
            cbit_ready[b] = finish
        end = max(end, finish)
    return end


def serialize_fanouts(c: Circuit) -> Circuit:
    """Split every multi-target CNOT into single-target CNOTs in target order."""
    gates: list[Gate] = []
    for g in c.gates:
        if g.kind is GateKind.CX and len(g.targets) > 1:
            gates.extend(Gate(GateKind.CX, (g.control, t), condition=g.condition) for t in g.targets)
        else:
            gates.append(g)
    return c.with_gates(gates)


@dataclass(frozen=True)
class Metrics:
    depth_multi: int = 0
    depth_serial: int = 0
    t_count: int = 0
    t_depth: int = 0
    cnot_steps: int = 0
    ancilla_count: int = 0
    cnot_count: int = 0
    swap_count: int = 0
    swap_depth: int = 0
    gate_count: int = 0
    max_interaction_degree: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


def metrics(c: Circuit) -> Metrics:
    sched = asap_schedule(c)
    graph = interaction_graph(c)
    return Metrics(
        depth_multi=len(sched),
        depth_serial=serial_depth(c),
        t_count=sum(g.is_t for g in c.gates),
        t_depth=t_depth(c),
        cnot_steps=sum(any(g.kind is GateKind.CX for g in layer) for layer in sched.layers),
        ancilla_count=len(c.ancillae),
        cnot_count=sum(len(g.targets) for g in c.gates if g.kind is GateKind.CX),
        swap_count=sum(g.kind is GateKind.SWAP for g in c.gates),
        swap_depth=sum(any(g.kind is GateKind.SWAP for g in layer) for layer in sched.layers),
        gate_count=len(c.gates),
        max_interaction_degree=max((d for _, d in graph.degree), default=0),
    )


def interaction_graph(c: Circuit) -> nx.Graph:
    """Undirected graph on qubit labels; an edge per coupled pair."""
    g = nx.Graph()
    g.add_nodes_from(c.labels)
    for gate in c.gates:
        for u, v in gate.pairs():
            g.add_edge(c.labels[u], c.labels[v])
    return g


def inverse(c: Circuit) -> Circuit:
    if c.has_measurement:
        raise NotInvertibleError("circuit contains a measurement")
    return c.with_gates(g.dagger() for g in reversed(c.gates))


def format_gate(g: Gate, labels: Sequence[str]) -> str:
    if g.kind is GateKind.CX:
        text = f"CX({labels[g.control]}->{{{','.join(labels[t] for t in g.targets)}}})"
    elif g.is_measurement:
        text = f"{g.kind.value.upper()}({labels[g.qubits[0]]}->c{g.cbit})"
    else:
        text = f"{g.kind.value.upper()}({','.join(labels[q] for q in g.qubits)})"
    if g.condition is not None:
        text = f"if(c{g.condition}) {text}"
    return text


def format_schedule(c: Circuit, sched: Schedule | None = None) -> str:
    sched = sched or asap_schedule(c)
    lines = []
    for i, layer in enumerate(sched.layers, 1):
        lines.append(f"L{i}: " + " | ".join(format_gate(g, c.labels) for g in layer))
    return "\n".join(lines)
