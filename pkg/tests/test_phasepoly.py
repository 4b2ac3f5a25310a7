from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetoff.acceptance import random_circuit
from latticetoff.circuit import CircuitBuilder, GateKind
from latticetoff.constructions import and_tdepth1, cs_gadget, margolus_rccx, paper_toffoli, standard_toffoli_7t
from latticetoff.phasepoly import (
    ExtractionError,
    PhasePolynomial,
    ccz_poly,
    cs_poly,
    extract,
    lift,
    poly_equal,
    term_count,
)
from latticetoff.ring import RingScalar
from latticetoff.sim import bits_to_index, index_to_bits, unitary_of

LINEAR_DIAGONAL = (GateKind.X, GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.CX, GateKind.SWAP)


def phase_oracle(c):
    """x -> (k, y) with U|x> = w^k |y>, read off the exact unitary."""
    u = unitary_of(c)
    out = {}
    for x in range(2**c.n):
        nonzero = [(y, u[y, x]) for y in range(2**c.n) if not u[y, x].is_zero()]
        assert len(nonzero) == 1
        y, amp = nonzero[0]
        k = next(p for p in range(8) if amp == RingScalar.omega(p))
        out[x] = (k, y)
    return out


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 4), st.integers(0, 16))
def test_extraction_is_sound(rng, n, length):
    c = random_circuit(rng, n, length, LINEAR_DIAGONAL)
    poly, wires = extract(c, {lb: lb for lb in c.labels})
    for x, (k, y) in phase_oracle(c).items():
        bits = index_to_bits(x, n)
        assert poly.evaluate(bits) == k
        assert bits_to_index(wires.evaluate(bits)) == y


def test_reference_polynomials_evaluate_to_their_gates():
    for bits in itertools.product((0, 1), repeat=3):
        assert ccz_poly().evaluate(bits) == 4 * (bits[0] & bits[1] & bits[2])
    for bits in itertools.product((0, 1), repeat=2):
        assert cs_poly().evaluate(bits) == 2 * (bits[0] & bits[1])


def test_term_counts():
    assert term_count(ccz_poly()) == 7
    assert term_count(cs_poly()) == 3
    rccx, _ = extract(margolus_rccx().core)
    assert term_count(rccx) == 4


def test_headline_core_is_ccz_with_identity_wires():
    poly, wires = extract(paper_toffoli().core)
    assert poly_equal(poly, ccz_poly(("c1", "c2", "t")))
    assert wires.is_identity_on({0: 0, 1: 1, 2: 2})
    assert all(p.mask == 0 and p.const == 0 for p in wires.wires[3:])


def test_textbook_core_is_ccz():
    poly, _ = extract(standard_toffoli_7t().core)
    assert poly_equal(poly, ccz_poly(("c1", "c2", "t")))


def test_and_core_has_four_terms():
    poly, _ = extract(and_tdepth1().core, {"c1": "c1", "c2": "c2", "t": "t"})
    assert term_count(poly) == 4


def test_rccx_plus_cs_is_ccz():
    rccx, _ = extract(margolus_rccx().core)
    cs = lift(cs_poly(("c1", "c2")), ("c1", "c2", "t"))
    assert poly_equal(rccx + cs, ccz_poly(("c1", "c2", "t")))


def test_preloaded_parity_input():
    poly, wires = extract(cs_gadget(preloaded=True).circuit, {"c1": "x1", "c2": "x2", "a1": "x1+x2"})
    assert poly_equal(poly, cs_poly())
    assert wires.wires[2].mask == 0


def test_render_format():
    p = PhasePolynomial.from_parities(("x1", "x2"), {"x1": 1, "x1+x2": 7})
    assert p.render() == "1·(x1) + 7·(x1+x2) [mod 8]"


def test_coefficients_reduce_mod_eight():
    p = PhasePolynomial.from_parities(("x1",), {"x1": 9})
    q = PhasePolynomial.from_parities(("x1",), {"x1": 1})
    assert poly_equal(p, q)
    assert term_count(PhasePolynomial.from_parities(("x1",), {"x1": 8})) == 0


def test_constant_input_folds_into_global_phase():
    c = CircuitBuilder(["q0"]).t("q0").build()
    poly, _ = extract(c, {"q0": 1})
    assert term_count(poly) == 0
    assert poly.global_phase % 8 == 1


@pytest.mark.parametrize("build", [lambda b: b.h("q0"), lambda b: b.cz("q0", "q1")])
def test_outside_domain_rejected(build):
    b = CircuitBuilder(["q0", "q1"])
    build(b)
    with pytest.raises(ExtractionError):
        extract(b.build())


def test_duplicate_variable_rejected():
    c = CircuitBuilder(["q0", "q1"]).build()
    with pytest.raises(ExtractionError):
        extract(c, {"q0": "x", "q1": "x"})
