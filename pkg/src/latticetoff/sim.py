"""Exact statevector / unitary simulation over the Clifford+T ring.

Basis convention: qubit 0 is the most significant bit, so basis index
``sum(bit_q << (n - 1 - q))``.  Gates act on the row axes of a coefficient
array of shape ``(4, 2, ..., 2, *rest)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, Gate, GateKind
from .ring import (
    INT_BOUND,
    RingArray,
    RingOverflowError,
    RingScalar,
    UnitaryMatrix,
    _maxabs,
    _normalize_array,
    mat_dagger,
    mat_mul,
    omega_shift,
)

MAX_QUBITS = 12

_PHASE = {GateKind.Z: 4, GateKind.S: 2, GateKind.SDG: 6, GateKind.T: 1, GateKind.TDG: 7}


class SimulationError(ValueError):
    pass


class StateVector(RingArray):
    __slots__ = ()

    def __init__(self, coeffs: np.ndarray, k: int = 0, *, canonical: bool = False):
        super().__init__(coeffs, k, canonical=canonical)
        (dim,) = self.shape
        if dim & (dim - 1):
            raise ValueError(f"state dimension {dim} is not a power of two")

    @property
    def n(self) -> int:
        return self.shape[0].bit_length() - 1

    @classmethod
    def basis(cls, n: int, index: int) -> StateVector:
        coeffs = np.zeros((4, 2**n), dtype=np.int64)
        coeffs[0, index] = 1
        return cls(coeffs, 0, canonical=True)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> StateVector:
        return cls.basis(len(bits), bits_to_index(bits))

    def norm2(self) -> Fraction:
        """Exact squared norm, sum of |amp|^2."""
        total = RingScalar()
        for i in range(self.shape[0]):
            amp = self[i]
            if not amp.is_zero():
                total = total + amp.abs2()
        return total.to_fraction()

    def amplitudes(self) -> dict[int, RingScalar]:
        return {i: self[i] for i in range(self.shape[0]) if self.coeffs[:, i].any()}


def bits_to_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | (b & 1)
    return idx


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - q)) & 1 for q in range(n))


def _sel(ndim: int, fixed: dict[int, int]) -> tuple:
    sl: list = [slice(None)] * ndim
    for axis, value in fixed.items():
        sl[axis] = value
    return tuple(sl)


def _apply(arr: np.ndarray, k: int, g: Gate) -> tuple[np.ndarray, int]:
    """Apply one unitary gate to the qubit axes of ``arr`` (qubit q is axis q+1)."""
    kind = g.kind
    ax = [q + 1 for q in g.qubits]
    nd = arr.ndim
    if kind is GateKind.X:
        return np.flip(arr, axis=ax[0]), k
    if kind in _PHASE:
        out = arr.copy()
        s = _sel(nd, {ax[0]: 1})
        out[s] = omega_shift(arr[s], _PHASE[kind])
        return out, k
    if kind is GateKind.CZ:
        out = arr.copy()
        s = _sel(nd, {ax[0]: 1, ax[1]: 1})
        out[s] = -arr[s]
        return out, k
    if kind is GateKind.SWAP:
        return np.swapaxes(arr, ax[0], ax[1]), k
    if kind is GateKind.CX:
        out = arr.copy()
        s = _sel(nd, {ax[0]: 1})
        sub = arr[s]
        for t in ax[1:]:
            sub = np.flip(sub, axis=t - 1 if t > ax[0] else t)
        out[s] = sub
        return out, k
    if kind is GateKind.H:
        if 2 * _maxabs(arr) >= INT_BOUND:
            raise RingOverflowError("Hadamard would overflow")
        x0 = arr[_sel(nd, {ax[0]: 0})]
        x1 = arr[_sel(nd, {ax[0]: 1})]
        out = np.stack([x0 + x1, x0 - x1], axis=ax[0])
        return _normalize_array(out, k + 1)
    raise SimulationError(f"{kind.value} is not a unitary gate")


def _run(arr: np.ndarray, k: int, gates: Iterable[Gate]) -> tuple[np.ndarray, int]:
    for g in gates:
        if g.is_measurement:
            raise SimulationError("measurement present; use run_with_measurement")
        if g.condition is not None:
            raise SimulationError("classically controlled gate outside a measurement run")
        arr, k = _apply(arr, k, g)
    return arr, k


def _check_size(n: int) -> None:
    if n > MAX_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the dense simulation bound of {MAX_QUBITS}")


def unitary_of(c: Circuit) -> UnitaryMatrix:
    """Exact unitary of a measurement-free circuit."""
    _check_size(c.n)
    dim = 2**c.n
    arr = np.zeros((4, dim, dim), dtype=np.int64)
    arr[0] = np.eye(dim, dtype=np.int64)
    arr, k = _run(arr.reshape((4,) + (2,) * c.n + (dim,)), 0, c.gates)
    return UnitaryMatrix(np.ascontiguousarray(arr).reshape(4, dim, dim), k)


def apply_circuit(c: Circuit, state: RingArray) -> RingArray:
    """Apply ``c`` to a state vector or to every column of a ``2^n x m`` array."""
    _check_size(c.n)
    shape = state.shape
    if shape[0] != 2**c.n:
        raise SimulationError(f"state dimension {shape[0]} does not match {c.n} qubits")
    arr = state.coeffs.reshape((4,) + (2,) * c.n + shape[1:])
    arr, k = _run(arr, state.k, c.gates)
    out = np.ascontiguousarray(arr).reshape((4,) + shape)
    return type(state)(out, k) if len(shape) == 1 else RingArray(out, k)


def gate_matrix(g: Gate) -> UnitaryMatrix:
    """Matrix of ``g`` on its own operands, in operand order."""
    local = Gate(g.kind, tuple(range(len(g.qubits))))
    return unitary_of(Circuit.from_labels([f"q{i}" for i in range(len(g.qubits))], [local]))


def equal_exact(a: RingArray, b: RingArray) -> bool:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    return a == b


def equal_up_to_global_phase(a: RingArray, b: RingArray) -> int | None:
    """Return ``k`` in 0..7 with ``a == w**k * b``, or None."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    for k in range(8):
        if a == b.times_omega(k):
            return k
    return None


def data_inputs(n: int, data: Sequence[int], zero_inputs: Iterable[int] = ()) -> list[tuple[int, int]]:
    """(data index, full index) pairs with all non-data qubits at 0.

    Data qubits listed in ``zero_inputs`` are also held at 0.
    """
    zero = set(zero_inputs)
    pairs = []
    for x in range(2 ** len(data)):
        bits = index_to_bits(x, len(data))
        if any(b and q in zero for b, q in zip(bits, data)):
            continue
        full = [0] * n
        for b, q in zip(bits, data):
            full[q] = b
        pairs.append((x, bits_to_index(full)))
    return pairs


def _embedding(n: int, data: Sequence[int], pairs: list[tuple[int, int]]) -> RingArray:
    coeffs = np.zeros((4, 2**n, len(pairs)), dtype=np.int64)
    for col, (_, full) in enumerate(pairs):
        coeffs[0, full, col] = 1
    return RingArray(coeffs, 0, canonical=True)


@dataclass(frozen=True)
class Mismatch:
    data_index: int
    data_bits: tuple[int, ...]
    phase: int | None  # w**phase relating got to expected, when proportional
    got: RingArray
    expected: RingArray


def find_ancilla_zero_mismatch(
    c: Circuit,
    target: UnitaryMatrix,
    ancillae: Iterable[int],
    zero_inputs: Iterable[int] = (),
) -> Mismatch | None:
    """First data basis input on which ``c`` (ancillae at |0>) differs from ``target``."""
    anc = sorted(set(ancillae))
    data = [q for q in range(c.n) if q not in anc]
    if target.n != len(data):
        raise ValueError(f"target acts on {target.n} qubits, circuit has {len(data)} data qubits")
    pairs = data_inputs(c.n, data, zero_inputs)
    got = apply_circuit(c, _embedding(c.n, data, pairs))
    full_pairs = data_inputs(c.n, data)
    # expected: target column, embedded with ancillae back at |0>
    tcols = np.zeros((4, 2**c.n, len(pairs)), dtype=np.int64)
    for col, (x, _) in enumerate(pairs):
        for y, full in full_pairs:
            tcols[:, full, col] = target.coeffs[:, y, x]
    expected = RingArray(tcols, target.k)
    if got == expected:
        return None
    for col, (x, _) in enumerate(pairs):
        g_col = RingArray(got.coeffs[:, :, col], got.k)
        e_col = RingArray(expected.coeffs[:, :, col], expected.k)
        if g_col != e_col:
            return Mismatch(x, index_to_bits(x, len(data)), equal_up_to_global_phase(g_col, e_col), g_col, e_col)
    raise AssertionError("unreachable: arrays differ but no column does")


def equal_on_ancilla_zero(
    c: Circuit,
    target: UnitaryMatrix,
    ancillae: Iterable[int],
    zero_inputs: Iterable[int] = (),
) -> bool:
    """True iff c(|x>|0..0>) == (target|x>)|0..0> exactly for every data basis |x>."""
    return find_ancilla_zero_mismatch(c, target, ancillae, zero_inputs) is None


def permutation_matrix(perm: Sequence[int]) -> UnitaryMatrix:
    """Unitary moving the state of qubit ``i`` to wire ``perm[i]``."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation")
    dim = 2**n
    coeffs = np.zeros((4, dim, dim), dtype=np.int64)
    for x in range(dim):
        bits = index_to_bits(x, n)
        out = [0] * n
        for i, b in enumerate(bits):
            out[perm[i]] = b
        coeffs[0, bits_to_index(out), x] = 1
    return UnitaryMatrix(coeffs, 0, canonical=True)


# -- measurement ------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementBranch:
    outcomes: tuple[int | None, ...]
    state: StateVector
    corrections: tuple[Gate, ...] = ()

    @property
    def outcome(self) -> int | None:
        """The last measured bit (the common single-measurement case)."""
        seen = [o for o in self.outcomes if o is not None]
        return seen[-1] if seen else None

    def norm2(self) -> Fraction:
        return self.state.norm2()


def _project(state: StateVector, n: int, q: int, value: int) -> StateVector:
    arr = state.coeffs.reshape((4,) + (2,) * n).copy()
    arr[_sel(arr.ndim, {q + 1: 1 - value})] = 0
    return StateVector(arr.reshape(4, -1), state.k)


def run_with_measurement(c: Circuit, state: StateVector, measurable: Iterable[int] | None = None) -> list[MeasurementBranch]:
    """Enumerate every measurement outcome exactly; no sampling.

    Branch states are unnormalised, so their squared norms are the outcome
    probabilities.  Only qubits in ``measurable`` (default: the circuit's
    ancillae) may be measured.
    """
    _check_size(c.n)
    allowed = set(c.ancillae if measurable is None else measurable)
    branches = [MeasurementBranch((None,) * c.num_clbits, state)]
    for g in c.gates:
        nxt: list[MeasurementBranch] = []
        for br in branches:
            if g.is_measurement:
                (q,) = g.qubits
                if q not in allowed:
                    raise SimulationError(f"measurement on non-ancilla qubit {c.labels[q]}")
                st = br.state
                basis_change = g.kind is GateKind.MEASURE_X
                if basis_change:
                    st = apply_circuit(Circuit(c.qubits, (Gate(GateKind.H, (q,)),)), st)
                for value in (0, 1):
                    proj = _project(st, c.n, q, value)
                    if proj.is_zero():
                        continue
                    if basis_change:
                        proj = apply_circuit(Circuit(c.qubits, (Gate(GateKind.H, (q,)),)), proj)
                    outs = list(br.outcomes)
                    outs[g.cbit] = value
                    nxt.append(MeasurementBranch(tuple(outs), proj, br.corrections))
            elif g.condition is not None:
                bit = br.outcomes[g.condition]
                if bit is None:
                    raise SimulationError(f"classical bit {g.condition} read before it is measured")
                if bit:
                    plain = Gate(g.kind, g.qubits)
                    st = apply_circuit(Circuit(c.qubits, (plain,)), br.state)
                    nxt.append(MeasurementBranch(br.outcomes, st, br.corrections + (g,)))
                else:
                    nxt.append(br)
            else:
                st = apply_circuit(Circuit(c.qubits, (g,)), br.state)
                nxt.append(MeasurementBranch(br.outcomes, st, br.corrections))
        branches = nxt
    return branches


@dataclass(frozen=True)
class ChannelCheck:
    ok: bool
    constants: dict[tuple[int | None, ...], RingScalar]
    total_weight: Fraction
    reason: str = ""


def check_branch_proportionality(c: Circuit, target: UnitaryMatrix, ancillae: Iterable[int] | None = None) -> ChannelCheck:
    """Check that every measurement branch acts on the data as ``lambda_b * target``.

    For each outcome record the branch output of every data basis input
    (ancillae at |0>).  Within a branch the ancillae must sit in one fixed
    basis configuration; the resulting data operator ``M_b`` must satisfy
    ``M_b @ target^dagger == lambda_b * I`` and ``sum |lambda_b|^2 == 1``.
    """
    anc = sorted(set(c.ancillae if ancillae is None else ancillae))
    data = [q for q in range(c.n) if q not in anc]
    d = len(data)
    if target.n != d:
        raise ValueError(f"target acts on {target.n} qubits, circuit has {d} data qubits")
    columns: dict[tuple, dict[int, StateVector]] = {}
    for x, full in data_inputs(c.n, data):
        for br in run_with_measurement(c, StateVector.basis(c.n, full), anc):
            columns.setdefault(br.outcomes, {})[x] = br.state
    constants: dict[tuple, RingScalar] = {}
    weight = Fraction(0)
    ident = UnitaryMatrix.identity(d)
    for outcome, cols in sorted(columns.items(), key=lambda kv: str(kv[0])):
        support = set()
        for st in cols.values():
            for i in st.amplitudes():
                bits = index_to_bits(i, c.n)
                support.add(tuple(bits[q] for q in anc))
        if len(support) != 1:
            return ChannelCheck(False, constants, weight, f"branch {outcome}: ancillae not in a single basis state")
        (anc_bits,) = support
        m = np.zeros((4, 2**d, 2**d), dtype=np.int64)
        k = max(st.k for st in cols.values())
        for x, st in cols.items():
            sc = st._with_k(k)
            for y in range(2**d):
                full = [0] * c.n
                for b, q in zip(index_to_bits(y, d), data):
                    full[q] = b
                for b, q in zip(anc_bits, anc):
                    full[q] = b
                m[:, y, x] = sc[:, bits_to_index(full)]
        op = mat_mul(UnitaryMatrix(m, k), mat_dagger(target))
        lam = op[0, 0]
        if op != ident.scale(lam):
            return ChannelCheck(False, constants, weight, f"branch {outcome}: data operator not proportional to target")
        constants[outcome] = lam
        weight += lam.abs2().to_fraction()
    return ChannelCheck(weight == 1, constants, weight, "" if weight == 1 else f"branch weights sum to {weight}")


# -- reference gates, built directly from their definitions -------------------


def ccx_matrix() -> UnitaryMatrix:
    """Toffoli on (c1, c2, t): flips t iff both controls are 1."""
    return _permutation_unitary(3, lambda b: (b[0], b[1], b[2] ^ (b[0] & b[1])))


def cs_matrix() -> UnitaryMatrix:
    """Controlled-S, diag(1, 1, 1, i)."""
    coeffs = np.zeros((4, 4, 4), dtype=np.int64)
    coeffs[0, 0, 0] = coeffs[0, 1, 1] = coeffs[0, 2, 2] = 1
    coeffs[2, 3, 3] = 1
    return UnitaryMatrix(coeffs, 0, canonical=True)


def ccz_matrix() -> UnitaryMatrix:
    coeffs = np.zeros((4, 8, 8), dtype=np.int64)
    coeffs[0] = np.diag([1, 1, 1, 1, 1, 1, 1, -1])
    return UnitaryMatrix(coeffs, 0, canonical=True)


def _permutation_unitary(n: int, fn) -> UnitaryMatrix:
    dim = 2**n
    coeffs = np.zeros((4, dim, dim), dtype=np.int64)
    for x in range(dim):
        coeffs[0, bits_to_index(fn(index_to_bits(x, n))), x] = 1
    return UnitaryMatrix(coeffs, 0, canonical=True)


REFERENCES = {"toffoli": ccx_matrix, "cs": cs_matrix, "ccz": ccz_matrix, "and": ccx_matrix}
