from __future__ import annotations

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetoff import arch
from latticetoff.acceptance import REFERENCE_PLACEMENT, random_circuit
from latticetoff.circuit import Circuit, CircuitBuilder, metrics
from latticetoff.constructions import cs_gadget, margolus_rccx, paper_toffoli, standard_toffoli_7t
from latticetoff.ring import mat_mul
from latticetoff.sim import permutation_matrix, unitary_of


def brute_force_embedding(c, g):
    """Oracle: first executable placement in lexicographic order."""
    for p in arch.placements(c, g):
        if arch.is_executable(c, g, p):
            return p
    return None


def test_grid_and_line_shapes():
    g = arch.grid(3, 2)
    assert g.number_of_nodes() == 6 and g.number_of_edges() == 7
    assert nx.is_bipartite(g)
    assert arch.line(4).number_of_edges() == 3
    assert arch.parse_arch("grid:6x4").number_of_nodes() == 24
    assert arch.parse_arch("line:5").graph["kind"] == "line"
    with pytest.raises(arch.ArchError):
        arch.parse_arch("hex:3")


def test_reference_placement_is_executable_without_swaps():
    c, g = paper_toffoli().circuit, arch.grid(3, 2)
    assert arch.is_executable(c, g, REFERENCE_PLACEMENT)
    assert arch.route_greedy(c, g, REFERENCE_PLACEMENT).swap_count == 0


def test_first_violation_reports_pair():
    c = CircuitBuilder(["q0", "q1"]).cx("q0", "q1").build()
    v = arch.first_violation(c, arch.grid(2, 2), {"q0": (0, 0), "q1": (1, 1)})
    assert v is not None and v.pair == ("q0", "q1")
    assert "not coupled" in str(v)


def test_placement_validation():
    c = CircuitBuilder(["q0", "q1"]).build()
    with pytest.raises(arch.ArchError):
        arch.is_executable(c, arch.line(2), {"q0": (0, 0)})
    with pytest.raises(arch.ArchError):
        arch.is_executable(c, arch.line(2), {"q0": (0, 0), "q1": (0, 0)})
    with pytest.raises(arch.ArchError):
        arch.is_executable(c, arch.line(2), {"q0": (0, 0), "q1": (5, 5)})


@pytest.mark.parametrize("build", [paper_toffoli, cs_gadget, margolus_rccx, standard_toffoli_7t])
@pytest.mark.parametrize("shape", [(3, 2), (2, 2), (3, 1)])
def test_embedding_matches_brute_force(build, shape):
    c, g = build().circuit, arch.grid(*shape)
    if c.n > g.number_of_nodes():
        assert arch.find_grid_embedding(c, g) is None
    else:
        assert arch.find_grid_embedding(c, g) == brute_force_embedding(c, g)


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(2, 4), st.integers(0, 8))
def test_embedding_matches_brute_force_random(rng, n, length):
    c = random_circuit(rng, n, length)
    g = arch.grid(2, 2)
    assert arch.find_grid_embedding(c, g) == brute_force_embedding(c, g)


def test_triangle_never_embeds():
    c = standard_toffoli_7t().circuit
    assert not nx.is_bipartite(arch.interaction_graph(c))
    for w, h in itertools.product(range(1, 5), repeat=2):
        assert arch.find_grid_embedding(c, arch.grid(w, h)) is None


def test_embedding_domain_limit():
    c = Circuit.from_labels([f"q{i}" for i in range(arch.MAX_EMBED_QUBITS + 1)])
    with pytest.raises(arch.ArchError):
        arch.find_grid_embedding(c, arch.grid(3, 3))


@pytest.mark.parametrize("g", [arch.line(3), arch.grid(3, 2)], ids=["line3", "grid3x2"])
def test_baseline_needs_swap_for_every_placement(g):
    c = standard_toffoli_7t().circuit
    assert min(arch.route_greedy(c, g, p).swap_count for p in arch.placements(c, g)) >= 1


def test_diagonal_cnot_costs_one_swap():
    c = CircuitBuilder(["q0", "q1"]).cx("q0", "q1").build()
    r = arch.route_greedy(c, arch.grid(2, 2), {"q0": (0, 0), "q1": (1, 1)})
    assert r.swap_count == 1
    assert r.cnot_count_serial == 4
    assert metrics(r.circuit).swap_count == 1


def routed_matches(c: Circuit, g: nx.Graph, p: dict) -> bool:
    r = arch.route_greedy(c, g, p)
    wires = [r.wires.index(p[lb]) for lb in c.labels]
    embedded = Circuit.from_labels([q.label for q in r.circuit.qubits], (gate.remap(wires) for gate in c.gates))
    return unitary_of(r.circuit) == mat_mul(permutation_matrix(r.permutation), unitary_of(embedded))


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(2, 4), st.integers(0, 10), st.sampled_from(["line:4", "grid:2x2", "grid:3x2"]))
def test_routing_sound_up_to_permutation(rng, n, length, spec):
    c = random_circuit(rng, n, length)
    g = arch.parse_arch(spec)
    p = dict(zip(c.labels, rng.sample(sorted(g.nodes), n)))
    assert routed_matches(c, g, p)
    r = arch.route_greedy(c, g, p)
    assert arch.is_executable(r.circuit, g, dict(zip(r.circuit.labels, r.wires)))


def test_routing_disconnected_graph():
    g = nx.Graph(kind="custom")
    g.add_nodes_from([(0, 0), (5, 5)])
    c = CircuitBuilder(["q0", "q1"]).cx("q0", "q1").build()
    with pytest.raises(arch.ArchError):
        arch.route_greedy(c, g, {"q0": (0, 0), "q1": (5, 5)})


def test_best_routing_prefers_embedding():
    r = arch.best_routing(paper_toffoli().circuit, arch.grid(3, 3))
    assert r.swap_count == 0
    assert arch.best_routing(standard_toffoli_7t().circuit, arch.grid(3, 2)).swap_count == 1


def test_tiling_is_disjoint_and_executable():
    c = paper_toffoli().circuit
    base = arch.find_grid_embedding(c, arch.grid(3, 2))
    host = arch.grid(6, 4)
    tiles = arch.tile(base, host)
    assert len(tiles) == 4
    used = [v for t in tiles for v in t.values()]
    assert len(used) == len(set(used)) == 24
    assert all(arch.is_executable(c, host, t) for t in tiles)
    assert len(arch.tile(base, arch.grid(7, 5))) == 4
    with pytest.raises(arch.ArchError):
        arch.tile(base, arch.grid(2, 2))


def test_render_grid_marks_used_couplers():
    c = paper_toffoli().circuit
    g = arch.grid(3, 2)
    text = arch.render_grid(g, REFERENCE_PLACEMENT, arch.used_couplers(c, REFERENCE_PLACEMENT))
    assert text.splitlines()[0].split() == ["a1", "===", "t", "===", "a2"]
    assert text.count("===") == 4 and text.count("#") == 3
