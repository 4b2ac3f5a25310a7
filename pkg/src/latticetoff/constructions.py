"""Named Clifford+T circuits: the T-depth-2 lattice Toffoli, its building
blocks, and the baselines it is compared against.

Qubit labels: ``c1``, ``c2`` controls, ``t`` target, ``a1..`` ancillae.  In
the six-qubit circuits ``a1`` copies ``c1``, ``a2`` copies ``c2`` and ``a3``
carries the shared parity ``c1 xor c2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .circuit import Circuit, CircuitBuilder, Gate, GateKind, inverse


@dataclass(frozen=True)
class NamedConstruction:
    name: str
    circuit: Circuit
    core: Circuit | None = None
    expected: dict[str, int] = field(default_factory=dict)
    reference: str | None = None
    zero_inputs: tuple[str, ...] = ()
    description: str = ""

    @property
    def ancillae(self) -> tuple[str, ...]:
        return tuple(self.circuit.labels[i] for i in self.circuit.ancillae)


def _drop(c: Circuit, kinds: set[GateKind], on: str = "t") -> Circuit:
    q = c.index(on)
    return c.with_gates(g for g in c.gates if not (g.kind in kinds and g.qubits == (q,)))


def _and_gates(b: CircuitBuilder, c1: str, c2: str, t: str, a1: str, a2: str, a3: str, with_s: bool = True) -> None:
    # parity network: a1 = c1^t, a2 = c2^t, a3 = c1^c2^t around one T layer
    b.h(t).cx(c1, a1, a3).cx(c2, a2, a3)
    b.cx(t, a1, a2, a3)
    b.t(t).tdg(a1).tdg(a2).t(a3)
    b.cx(t, a1, a2, a3)
    b.h(t).cx(c1, a1, a3)
    if with_s:
        b.s(t)
    b.cx(c2, a2, a3)


def paper_toffoli() -> NamedConstruction:
    """T-depth-2 Toffoli with three ancillae, executable on a 3x2 grid patch.

    The AND phase layer and the controlled-S layer share the ancilla
    parities: after the second fan-out from ``t`` the ancillae hold
    ``x1, x2, x1^x2`` again, so the controlled-S T layer needs no extra
    CNOTs.
    """
    b = CircuitBuilder(["c1", "c2", "t", "a1", "a2", "a3"])
    b.h("t").cx("c1", "a1", "a3")
    b.cx("c2", "a2", "a3")
    b.cx("t", "a1", "a2", "a3")
    b.t("t").tdg("a1").tdg("a2").t("a3")
    b.cx("t", "a1", "a2", "a3")
    b.h("t").t("c1").t("a2").tdg("a3")
    b.cx("c2", "a2", "a3")
    b.cx("c1", "a1", "a3")
    c = b.build()
    return NamedConstruction(
        "paper-toffoli", c, core=_drop(c, {GateKind.H}),
        expected=dict(t_count=7, t_depth=2, depth_multi=8, cnot_steps=6, ancilla_count=3),
        reference="toffoli",
        description="T-depth-2 SWAP-free Toffoli (AND + controlled-S sharing ancilla parities)",
    )


def and_tdepth1(with_s: bool = True) -> NamedConstruction:
    """Logical AND onto a fresh target ``t`` (|0> in) with T-depth 1.

    The trailing S on ``t`` cancels the ``-i`` relative phase left on the
    ``x1 = x2 = 1`` branch.
    """
    b = CircuitBuilder(["c1", "c2", "t", "a1", "a2", "a3"])
    _and_gates(b, "c1", "c2", "t", "a1", "a2", "a3", with_s=with_s)
    c = b.build()
    expected = dict(t_count=4, t_depth=1, depth_multi=7, ancilla_count=3) if with_s else {}
    return NamedConstruction(
        "and" if with_s else "and-no-s", c, core=_drop(c, {GateKind.H, GateKind.S}),
        expected=expected, reference="and", zero_inputs=("t",),
        description="T-depth-1 logical AND with three ancillae",
    )


def cs_gadget(preloaded: bool = False) -> NamedConstruction:
    """Controlled-S with one ancilla holding ``c1 xor c2``.

    With ``preloaded`` the compute CNOTs are omitted, for use when the
    ancilla already carries the parity.
    """
    b = CircuitBuilder(["c1", "c2", "a1"])
    if not preloaded:
        b.cx("c1", "a1").cx("c2", "a1")
    b.t("c1").t("c2").tdg("a1")
    b.cx("c2", "a1").cx("c1", "a1")
    c = b.build()
    return NamedConstruction(
        "cs" if not preloaded else "cs-preloaded", c, core=c,
        expected=dict(t_count=3, t_depth=1, ancilla_count=1) if not preloaded else {},
        reference="cs",
        description="controlled-S with one ancilla, T-depth 1",
    )


def margolus_rccx() -> NamedConstruction:
    """Relative-phase Toffoli from four T gates in a four-CNOT parity chain."""
    b = CircuitBuilder(["c1", "c2", "t"])
    b.h("t").t("t").cx("c2", "t").tdg("t").cx("c1", "t")
    b.t("t").cx("c2", "t").tdg("t").cx("c1", "t").h("t")
    c = b.build()
    return NamedConstruction(
        "rccx", c, core=_drop(c, {GateKind.H}),
        expected=dict(t_count=4),
        description="relative-phase (Margolus-style) Toffoli, four T gates",
    )


def standard_toffoli_7t() -> NamedConstruction:
    """Textbook ancilla-free Toffoli: 6 CNOTs, 7 T gates, 2 H."""
    b = CircuitBuilder(["c1", "c2", "t"])
    b.h("t").cx("c2", "t").tdg("t").cx("c1", "t").t("t").cx("c2", "t").tdg("t").cx("c1", "t")
    b.t("c2").t("t").h("t").cx("c1", "c2").t("c1").tdg("c2").cx("c1", "c2")
    c = b.build()
    return NamedConstruction(
        "toffoli-7t", c, core=_drop(c, {GateKind.H}),
        expected=dict(t_count=7, cnot_count=6, ancilla_count=0),
        reference="toffoli",
        description="standard 7-T Toffoli, no ancillae",
    )


def selinger_tdepth1_toffoli() -> NamedConstruction:
    """T-depth-1 Toffoli with four ancillae.

    Fan-outs from ``t``, ``c2`` and ``c1`` spread the seven CCZ parities
    over seven wires for a single layer of T/Tdg gates; ``t`` itself ends up
    coupled to four other qubits.
    """
    b = CircuitBuilder(["c1", "c2", "t", "a1", "a2", "a3", "a4"])
    encode = (
        CircuitBuilder(b.qubits)
        .h("t").cx("t", "a1", "a2", "a4").cx("c2", "a1", "a2", "a3").cx("c1", "a2", "a3", "t")
        .build()
    )
    # wires now hold x1, x2, x1^y, x2^y, x1^x2^y, x1^x2, y
    b.extend(encode.gates)
    b.tdg("c1").tdg("c2").t("t").t("a1").tdg("a2").t("a3").tdg("a4")
    b.extend(inverse(encode).gates)
    c = b.build()
    return NamedConstruction(
        "selinger", c, core=_drop(c, {GateKind.H}),
        expected=dict(t_count=7, t_depth=1, ancilla_count=4),
        reference="toffoli",
        description="T-depth-1 Toffoli with four ancillae",
    )


def _and_into(b: CircuitBuilder, out: str) -> list[Gate]:
    sub = CircuitBuilder(b.qubits)
    _and_gates(sub, "c1", "c2", out, "a1", "a2", "a3")
    return list(sub.build().gates)


def toffoli_via_two_ands() -> NamedConstruction:
    """AND into a fresh ancilla ``g``, CNOT onto ``t``, then the inverse AND."""
    labels = ["c1", "c2", "t", "g", "a1", "a2", "a3"]
    b = CircuitBuilder(labels)
    compute = _and_into(b, "g")
    b.extend(compute)
    b.cx("g", "t")
    b.extend(inverse(Circuit(b.qubits, tuple(compute))).gates)
    c = b.build()
    return NamedConstruction(
        "toffoli-2and", c,
        expected=dict(t_count=8, ancilla_count=4),
        reference="toffoli",
        description="Toffoli from two ANDs and a CNOT",
    )


def toffoli_via_and_measurement() -> NamedConstruction:
    """AND into ``g``, CNOT onto ``t``, then measure ``g`` in the X basis.

    Outcome 1 leaves a ``(-1)^{x1 x2}`` phase that a classically controlled
    CZ on the controls removes.
    """
    labels = ["c1", "c2", "t", "g", "a1", "a2", "a3"]
    b = CircuitBuilder(labels, num_clbits=1)
    b.extend(_and_into(b, "g"))
    b.cx("g", "t").h("g").measure("g", 0)
    b.cz("c1", "c2", condition=0)
    c = b.build()
    return NamedConstruction(
        "toffoli-meas", c,
        expected=dict(t_count=4, ancilla_count=4),
        reference="toffoli",
        description="Toffoli from one AND and measurement-based uncomputation",
    )


REGISTRY: dict[str, Callable[[], NamedConstruction]] = {
    "paper-toffoli": paper_toffoli,
    "and": and_tdepth1,
    "cs": cs_gadget,
    "rccx": margolus_rccx,
    "toffoli-7t": standard_toffoli_7t,
    "selinger": selinger_tdepth1_toffoli,
    "toffoli-2and": toffoli_via_two_ands,
    "toffoli-meas": toffoli_via_and_measurement,
}


def build(name: str) -> NamedConstruction:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown construction {name!r}; known: {', '.join(REGISTRY)}") from None
