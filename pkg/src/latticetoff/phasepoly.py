"""Phase polynomials of {CNOT, X, Z, S, T} circuits.

Such a circuit maps ``|x> -> w^{p(x)} |L(x)>`` where ``L`` is affine over
GF(2) and ``p`` is a sum of coefficients (mod 8) times parities of the
inputs.  Parities are bit masks over the input variables; a wire holding
``l(x) xor 1`` contributes ``c*(1 - l(x))``, so constant parts fold into
the global phase.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .circuit import Circuit, GateKind

_WEIGHT = {GateKind.T: 1, GateKind.TDG: 7, GateKind.S: 2, GateKind.SDG: 6, GateKind.Z: 4}


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class AffineParity:
    mask: int
    const: int = 0

    def evaluate(self, bits: Sequence[int]) -> int:
        v = self.const
        for i, b in enumerate(bits):
            if (self.mask >> i) & 1:
                v ^= b & 1
        return v

    def __xor__(self, other: AffineParity) -> AffineParity:
        return AffineParity(self.mask ^ other.mask, self.const ^ other.const)

    def render(self, variables: Sequence[str]) -> str:
        names = [v for i, v in enumerate(variables) if (self.mask >> i) & 1]
        if self.const:
            names.append("1")
        return "+".join(names) if names else "0"


@dataclass(frozen=True)
class PhasePolynomial:
    variables: tuple[str, ...]
    terms: Mapping[int, int] = field(default_factory=dict)
    global_phase: int = 0

    def __post_init__(self) -> None:
        clean = {m: c % 8 for m, c in self.terms.items() if c % 8}
        if any(m <= 0 or m >> len(self.variables) for m in clean):
            raise ValueError("term masks must be non-empty and within the variable count")
        object.__setattr__(self, "terms", dict(sorted(clean.items())))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "global_phase", self.global_phase % 8)

    @property
    def n(self) -> int:
        return len(self.variables)

    @classmethod
    def from_parities(cls, variables: Sequence[str], terms: Mapping[str, int], global_phase: int = 0) -> PhasePolynomial:
        """Build from terms keyed like ``"x1+x2"``."""
        masks: dict[int, int] = {}
        for key, coef in terms.items():
            mask = 0
            for name in key.split("+"):
                mask ^= 1 << list(variables).index(name.strip())
            masks[mask] = masks.get(mask, 0) + coef
        return cls(tuple(variables), masks, global_phase)

    def evaluate(self, bits: Sequence[int]) -> int:
        total = self.global_phase
        for mask, coef in self.terms.items():
            total += coef * AffineParity(mask).evaluate(bits)
        return total % 8

    def __add__(self, other: PhasePolynomial) -> PhasePolynomial:
        _same_vars(self, other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return PhasePolynomial(self.variables, terms, self.global_phase + other.global_phase)

    def render(self) -> str:
        parts = [f"{c}·({AffineParity(m).render(self.variables)})" for m, c in self.terms.items()]
        if self.global_phase:
            parts.append(f"{self.global_phase}·(1)")
        return (" + ".join(parts) or "0") + " [mod 8]"

    def __str__(self) -> str:
        return self.render()


def _same_vars(p: PhasePolynomial, q: PhasePolynomial) -> None:
    if p.n != q.n:
        raise ValueError(f"variable-count mismatch: {p.n} vs {q.n}")


def poly_equal(p: PhasePolynomial, q: PhasePolynomial) -> bool:
    _same_vars(p, q)
    return p.terms == q.terms and p.global_phase == q.global_phase


def term_count(p: PhasePolynomial) -> int:
    return len(p.terms)


@dataclass(frozen=True)
class LinearWireState:
    wires: tuple[AffineParity, ...]

    def evaluate(self, bits: Sequence[int]) -> tuple[int, ...]:
        return tuple(w.evaluate(bits) for w in self.wires)

    def is_identity_on(self, wire_to_var: Mapping[int, int]) -> bool:
        """Wires in ``wire_to_var`` hold their own variable; all others hold 0."""
        for i, w in enumerate(self.wires):
            want = AffineParity(1 << wire_to_var[i]) if i in wire_to_var else AffineParity(0)
            if w != want:
                return False
        return True


def default_inputs(c: Circuit) -> dict[str, str | int]:
    """Non-ancilla wires become variables (named by label); ancillae start at 0."""
    anc = set(c.ancillae)
    return {lb: (0 if i in anc else lb) for i, lb in enumerate(c.labels)}


def extract(c: Circuit, inputs: Mapping[str, str | int] | None = None) -> tuple[PhasePolynomial, LinearWireState]:
    """Phase polynomial and final wire parities of a diagonal-plus-linear circuit.

    ``inputs`` maps each qubit label to a variable name, a parity of
    variables such as ``"x1+x2"``, or a constant 0/1.  Variables are numbered
    in order of first appearance.
    """
    inputs = default_inputs(c) if inputs is None else dict(inputs)
    variables: list[str] = []
    wires: list[AffineParity] = []
    plain = [v for v in inputs.values() if isinstance(v, str) and "+" not in v]
    for v in plain:
        if plain.count(v) > 1:
            raise ExtractionError(f"variable {v!r} assigned to two wires")
    for lb in c.labels:
        v = inputs.get(lb, 0)
        if isinstance(v, str):
            mask = 0
            for name in (part.strip() for part in v.split("+")):
                if not name:
                    raise ExtractionError(f"malformed parity {v!r} on wire {lb!r}")
                if name not in variables:
                    variables.append(name)
                mask ^= 1 << variables.index(name)
            wires.append(AffineParity(mask))
        else:
            wires.append(AffineParity(0, int(v) & 1))
    terms: dict[int, int] = {}
    gphase = 0
    for g in c.gates:
        if g.condition is not None or g.is_measurement:
            raise ExtractionError("measurement and classical control are outside the extraction domain")
        if g.kind in _WEIGHT:
            w = _WEIGHT[g.kind]
            par = wires[g.qubits[0]]
            if par.const:
                gphase += w
                w = -w
            if par.mask:
                terms[par.mask] = terms.get(par.mask, 0) + w
        elif g.kind is GateKind.X:
            q = g.qubits[0]
            wires[q] = wires[q] ^ AffineParity(0, 1)
        elif g.kind is GateKind.CX:
            for t in g.targets:
                wires[t] = wires[t] ^ wires[g.control]
        elif g.kind is GateKind.SWAP:
            a, b = g.qubits
            wires[a], wires[b] = wires[b], wires[a]
        elif g.kind is GateKind.CZ:
            raise ExtractionError("CZ is outside the extraction domain")
        else:
            raise ExtractionError(f"{g.kind.value} is outside the extraction domain")
    return PhasePolynomial(tuple(variables), terms, gphase), LinearWireState(tuple(wires))


def ccz_poly(variables: Sequence[str] = ("x1", "x2", "x3")) -> PhasePolynomial:
    a, b, c = variables
    return PhasePolynomial.from_parities(variables, {
        a: 1, b: 1, c: 1,
        f"{a}+{b}": 7, f"{a}+{c}": 7, f"{b}+{c}": 7,
        f"{a}+{b}+{c}": 1,
    })


def cs_poly(variables: Sequence[str] = ("x1", "x2")) -> PhasePolynomial:
    a, b = variables
    return PhasePolynomial.from_parities(variables, {a: 1, b: 1, f"{a}+{b}": 7})


def lift(p: PhasePolynomial, variables: Sequence[str]) -> PhasePolynomial:
    """Re-express ``p`` over a superset of its variables."""
    variables = tuple(variables)
    remap = [variables.index(v) for v in p.variables]
    terms = {}
    for mask, coef in p.terms.items():
        m = 0
        for i, j in enumerate(remap):
            if (mask >> i) & 1:
                m |= 1 << j
        terms[m] = coef
    return PhasePolynomial(variables, terms, p.global_phase)
