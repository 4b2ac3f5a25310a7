"""Exit criteria for the package, runnable from pytest and ``latticetoff selfcheck``.

Each check returns ``(passed, detail)``.  Everything is exact except the
float-shadow comparison in the ring check (tolerance ``FLOAT_TOL``).
"""
from __future__ import annotations

import itertools
import random
from typing import Callable

import networkx as nx
import numpy as np

from . import arch, phasepoly, qasmio, sim
from .circuit import Circuit, CircuitBuilder, Gate, GateKind, asap_schedule, interaction_graph, metrics
from .constructions import (
    REGISTRY,
    and_tdepth1,
    cs_gadget,
    margolus_rccx,
    paper_toffoli,
    selinger_tdepth1_toffoli,
    standard_toffoli_7t,
    toffoli_via_and_measurement,
    toffoli_via_two_ands,
)
from .ring import RingScalar, mat_mul, normalize

FLOAT_TOL = 1e-12
REFERENCE_PLACEMENT = {"a1": (0, 0), "t": (1, 0), "a2": (2, 0), "c1": (0, 1), "a3": (1, 1), "c2": (2, 1)}

Result = tuple[bool, str]


def _metric_mismatch(c: Circuit, want: dict[str, int]) -> dict[str, tuple[int, int]]:
    m = metrics(c).as_dict()
    return {k: (v, m[k]) for k, v in want.items() if m[k] != v}


def headline_correctness() -> Result:
    c = paper_toffoli().circuit
    if not sim.equal_on_ancilla_zero(c, sim.ccx_matrix(), c.ancillae):
        return False, "ancilla-zero equivalence with CCX failed"
    u = sim.unitary_of(c)
    for x in range(8):
        x1, x2, y = sim.index_to_bits(x, 3)
        col = sim.bits_to_index((x1, x2, y, 0, 0, 0))
        want = sim.bits_to_index((x1, x2, y ^ (x1 & x2), 0, 0, 0))
        column = sim.RingArray(u.coeffs[:, :, col], u.k)
        if column != sim.StateVector.basis(6, want):
            return False, f"|{x1}{x2}{y},000> not mapped to |CCX x,000>"
    return True, "64x64 unitary maps |x,000> to |CCX x,000> for all 8 x"


def headline_metrics() -> Result:
    bad = _metric_mismatch(paper_toffoli().circuit, dict(t_count=7, t_depth=2, depth_multi=8, cnot_steps=6, ancilla_count=3))
    return not bad, f"mismatches {bad}" if bad else "t_count 7, t_depth 2, depth 8, 6 CNOT steps, 3 ancillae"


def and_gate() -> Result:
    nc = and_tdepth1()
    c = nc.circuit
    bad = _metric_mismatch(c, dict(t_count=4, t_depth=1, depth_multi=7))
    if bad:
        return False, f"metric mismatches {bad}"
    t = c.index("t")
    if not sim.equal_on_ancilla_zero(c, sim.ccx_matrix(), c.ancillae, zero_inputs=[t]):
        return False, "AND does not compute |x1 x2 0> -> |x1 x2 x1x2> with clean ancillae"
    bare = and_tdepth1(with_s=False).circuit
    for x1, x2 in itertools.product((0, 1), repeat=2):
        got = sim.apply_circuit(bare, sim.StateVector.from_bits((x1, x2, 0, 0, 0, 0)))
        ideal = sim.StateVector.from_bits((x1, x2, x1 & x2, 0, 0, 0))
        phase = sim.equal_up_to_global_phase(got, ideal)
        want = 6 if (x1 and x2) else 0  # w^6 = -i
        if phase != want:
            return False, f"without S, branch ({x1},{x2}) has phase w^{phase}, expected w^{want}"
    return True, "t_count 4, t_depth 1, depth 7; exact AND; without S the (1,1) branch carries -i"


def cs_gadget_check() -> Result:
    c = cs_gadget().circuit
    ok = sim.equal_on_ancilla_zero(c, sim.cs_matrix(), c.ancillae)
    m = metrics(c)
    ok = ok and m.t_depth == 1 and m.ancilla_count == 1
    return ok, f"exact CS on ancilla-zero: {ok}; t_depth {m.t_depth}; ancillae {m.ancilla_count}"


def phase_polynomials() -> Result:
    rccx_poly, _ = phasepoly.extract(margolus_rccx().core)
    ccz = phasepoly.ccz_poly(("c1", "c2", "t"))
    cs = phasepoly.lift(phasepoly.cs_poly(("c1", "c2")), ("c1", "c2", "t"))
    headline_poly, wires = phasepoly.extract(paper_toffoli().core)
    checks = {
        "rccx terms == 4": phasepoly.term_count(rccx_poly) == 4,
        "ccz terms == 7": phasepoly.term_count(phasepoly.ccz_poly()) == 7,
        "cs terms == 3": phasepoly.term_count(phasepoly.cs_poly()) == 3,
        "headline core == ccz": phasepoly.poly_equal(headline_poly, ccz),
        "headline core wires identity": wires.is_identity_on({0: 0, 1: 1, 2: 2}),
        "rccx + cs == ccz": phasepoly.poly_equal(rccx_poly + cs, ccz),
    }
    failed = [k for k, v in checks.items() if not v]
    return not failed, f"failed: {failed}" if failed else "; ".join(checks)


def connectivity() -> Result:
    c = paper_toffoli().circuit
    g = arch.grid(3, 2)
    degree = max(d for _, d in interaction_graph(c).degree)
    emb = arch.find_grid_embedding(c, g)
    if degree != 3 or emb is None:
        return False, f"max degree {degree}, embedding {emb}"
    if not arch.is_executable(c, g, emb):
        return False, "embedding found but not executable"
    swaps = arch.route_greedy(c, g, emb).swap_count
    ref_swaps = arch.route_greedy(c, g, REFERENCE_PLACEMENT).swap_count
    ok = swaps == 0 and ref_swaps == 0
    return ok, f"max degree 3; embedding {emb}; SWAPs inserted {swaps} (reference placement: {ref_swaps})"


def baseline_contrast() -> Result:
    c = standard_toffoli_7t().circuit
    if nx.is_bipartite(interaction_graph(c)):
        return False, "interaction graph unexpectedly bipartite"
    for w, h in itertools.product(range(1, 5), repeat=2):
        if arch.find_grid_embedding(c, arch.grid(w, h)) is not None:
            return False, f"embedding found on grid({w},{h})"
    worst = {}
    for name, g in (("line(3)", arch.line(3)), ("grid(3,2)", arch.grid(3, 2))):
        counts = [arch.route_greedy(c, g, p).swap_count for p in arch.placements(c, g)]
        worst[name] = min(counts)
        if min(counts) < 1:
            return False, f"a placement on {name} needs no SWAP"
    return True, f"non-bipartite, no grid embedding up to 4x4; min SWAPs {worst}"


def composition_recipes() -> Result:
    two = toffoli_via_two_ands().circuit
    if not sim.equal_on_ancilla_zero(two, sim.ccx_matrix(), two.ancillae):
        return False, "two-AND Toffoli is not exact"
    check = sim.check_branch_proportionality(toffoli_via_and_measurement().circuit, sim.ccx_matrix())
    if not check.ok:
        return False, f"measurement recipe: {check.reason}"
    lams = {k: str(v) for k, v in check.constants.items()}
    return True, f"two-AND exact; measurement branches {lams}, weights sum to {check.total_weight}"


def selinger_baseline() -> Result:
    c = selinger_tdepth1_toffoli().circuit
    m = metrics(c)
    exact = sim.equal_on_ancilla_zero(c, sim.ccx_matrix(), c.ancillae)
    ok = m.t_depth == 1 and m.ancilla_count == 4 and exact and m.max_interaction_degree > 3
    return ok, f"t_depth {m.t_depth}, ancillae {m.ancilla_count}, exact {exact}, max degree {m.max_interaction_degree}"


def tiling() -> Result:
    c = paper_toffoli().circuit
    base = arch.find_grid_embedding(c, arch.grid(3, 2))
    host = arch.grid(6, 4)
    tiles = arch.tile(base, host)
    used = [v for t in tiles for v in t.values()]
    disjoint = len(used) == len(set(used))
    executable = all(arch.is_executable(c, host, t) for t in tiles)
    ok = len(tiles) == 4 and disjoint and executable
    return ok, f"{len(tiles)} tiles, disjoint {disjoint}, all executable {executable}"


def io_roundtrips() -> Result:
    for name, build in REGISTRY.items():
        c = build().circuit
        for fmt, back in (
            ("qasm", qasmio.parse_qasm(qasmio.emit_qasm(c))),
            ("json", qasmio.parse_json(qasmio.emit_json(c))),
        ):
            if c.has_measurement:
                same = back == c and sim.check_branch_proportionality(back, sim.ccx_matrix()).ok
            else:
                same = sim.unitary_of(back) == sim.unitary_of(c)
            if not same:
                return False, f"{name} {fmt} round trip changed semantics"
        if qasmio.parse_json(qasmio.emit_json(c)) != c:
            return False, f"{name} JSON round trip is not structurally exact"
    return True, f"{len(REGISTRY)} constructions round-trip through QASM and JSON"


def random_circuit(rng: random.Random, n: int, length: int, kinds: tuple[GateKind, ...] | None = None) -> Circuit:
    kinds = kinds or (GateKind.H, GateKind.X, GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T,
                      GateKind.TDG, GateKind.CX, GateKind.CZ, GateKind.SWAP)
    b = CircuitBuilder([f"q{i}" for i in range(n)])
    for _ in range(length):
        kind = rng.choice(kinds)
        if kind is GateKind.CX and n >= 2:
            qs = rng.sample(range(n), rng.randint(2, n))
            b.add(kind, *qs)
        elif kind in (GateKind.CZ, GateKind.SWAP) and n >= 2:
            b.add(kind, *rng.sample(range(n), 2))
        elif kind not in (GateKind.CX, GateKind.CZ, GateKind.SWAP):
            b.add(kind, rng.randrange(n))
    return b.build()


def properties(seed: int = 7) -> Result:
    rng = random.Random(seed)
    for kind in GateKind:
        if kind in (GateKind.MEASURE_X, GateKind.MEASURE_Z):
            continue
        arity = 3 if kind is GateKind.CX else 2 if kind in (GateKind.CZ, GateKind.SWAP) else 1
        if not sim.gate_matrix(Gate(kind, tuple(range(arity)))).is_unitary():
            return False, f"{kind.value} matrix not unitary"
    circuits = [b().circuit for b in REGISTRY.values() if not b().circuit.has_measurement]
    circuits += [random_circuit(rng, rng.randint(1, 4), rng.randint(0, 12)) for _ in range(20)]
    for c in circuits:
        if sim.unitary_of(c.with_gates(asap_schedule(c).flatten())) != sim.unitary_of(c):
            return False, "ASAP layering changed a unitary"
    for _ in range(10):
        c = random_circuit(rng, 3, 10)
        g = rng.choice([arch.line(3), arch.grid(2, 2), arch.grid(3, 2)])
        p = dict(zip(c.labels, rng.sample(sorted(g.nodes), 3)))
        r = arch.route_greedy(c, g, p)
        wires = [r.wires.index(p[lb]) for lb in c.labels]
        embedded = Circuit.from_labels([q.label for q in r.circuit.qubits], (gate.remap(wires) for gate in c.gates))
        lhs = sim.unitary_of(r.circuit)
        rhs = mat_mul(sim.permutation_matrix(r.permutation), sim.unitary_of(embedded))
        if lhs != rhs:
            return False, "routing soundness failed"
    for _ in range(200):
        x = RingScalar(*(rng.randint(-40, 40) for _ in range(4)), rng.randint(0, 6))
        y = normalize(x)
        if normalize(y) != y or abs(x.to_complex() - y.to_complex()) > FLOAT_TOL:
            return False, f"normalize failed on {x}"
    return True, "gate unitarity, ASAP semantics, routing soundness, normalize idempotence (float shadow <= 1e-12)"


CRITERIA: list[tuple[str, Callable[[], Result]]] = [
    ("1 headline Toffoli is exact", headline_correctness),
    ("2 headline metrics", headline_metrics),
    ("3 AND gate", and_gate),
    ("4 controlled-S gadget", cs_gadget_check),
    ("5 phase polynomials", phase_polynomials),
    ("6 connectivity and zero SWAPs", connectivity),
    ("7 baseline needs SWAPs", baseline_contrast),
    ("8 composition recipes", composition_recipes),
    ("9 T-depth-1 baseline", selinger_baseline),
    ("10 tiling", tiling),
    ("11 I/O round trips", io_roundtrips),
    ("12 property suites", properties),
]


def run_all() -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in CRITERIA:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed criterion, reported not raised
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, ok, detail))
    return out
