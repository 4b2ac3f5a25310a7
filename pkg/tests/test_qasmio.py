from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetoff.acceptance import random_circuit
from latticetoff.circuit import GateKind, Role
from latticetoff.constructions import REGISTRY, paper_toffoli, toffoli_via_and_measurement
from latticetoff.qasmio import QasmError, SchemaError, emit_json, emit_qasm, load_circuit, parse_json, parse_qasm
from latticetoff.sim import unitary_of


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_registry_roundtrips_structurally(name):
    c = REGISTRY[name]().circuit
    assert parse_qasm(emit_qasm(c)) == c
    assert parse_json(emit_json(c, name)) == c


@settings(max_examples=50, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 4), st.integers(0, 14))
def test_random_roundtrips_preserve_unitary(rng, n, length):
    c = random_circuit(rng, n, length)
    for back in (parse_qasm(emit_qasm(c)), parse_json(emit_json(c))):
        assert back == c
        assert unitary_of(back) == unitary_of(c)


def test_fanout_encoding():
    text = emit_qasm(paper_toffoli().circuit)
    assert "// fanout 3" in text
    assert text.count("// fanout") == 6
    assert "// qubits: c1:control c2:control t:target a1:ancilla a2:ancilla a3:ancilla" in text


def test_fanout_becomes_plain_cx_without_comment():
    c = paper_toffoli().circuit
    stripped = "\n".join(line for line in emit_qasm(c).splitlines() if "fanout" not in line)
    back = parse_qasm(stripped)
    assert all(len(g.targets) == 1 for g in back.gates if g.kind is GateKind.CX)
    assert unitary_of(back) == unitary_of(c)


def test_classical_control_emitted():
    text = emit_qasm(toffoli_via_and_measurement().circuit)
    assert "if(c==1) cz" in text
    assert "measure" in text


def test_minimal_snippet():
    c = parse_qasm("t q[0];")
    assert c.n == 1 and len(c.gates) == 1 and c.gates[0].kind is GateKind.T


def test_labels_default_to_generic():
    c = parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[1];")
    assert c.labels == ("q0", "q1")
    assert all(q.role is Role.GENERIC for q in c.qubits)


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("OPENQASM 2.0;\nqreg q[2];\ncx q[0]", 3, 8, "expected ';'"),
        ("OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];", 3, 1, "unsupported gate 'ccx'"),
        ("OPENQASM 2.0;\nqreg q[2];\nh q[2];", 3, 5, "out of range"),
        ("OPENQASM 3.0;", 1, 10, "unsupported version"),
        ("qreg q[2];\nh r[0];", 2, 3, "unknown quantum register"),
        ("qreg q[2];\ncx q[0],q[0];", 2, 1, "repeated operand"),
        ("qreg q[2];\nh q[0] $", 2, 8, "unexpected character"),
        ("", 1, 1, "empty input"),
    ],
)
def test_parse_errors_report_position(text, line, col, fragment):
    with pytest.raises(QasmError) as info:
        parse_qasm(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert fragment in str(info.value)


def test_json_schema_violations():
    doc = json.loads(emit_json(paper_toffoli().circuit))
    doc["gates"][0]["op"] = "ccx"
    with pytest.raises(SchemaError, match="gates/0/op"):
        parse_json(json.dumps(doc))
    doc = json.loads(emit_json(paper_toffoli().circuit))
    doc["gates"][1]["targets"] = ["zz"]
    with pytest.raises(SchemaError, match="unknown qubit label"):
        parse_json(json.dumps(doc))
    with pytest.raises(SchemaError, match="invalid JSON"):
        parse_json("{")


def test_load_circuit_sniffs_format():
    c = paper_toffoli().circuit
    assert load_circuit(emit_json(c)) == c
    assert load_circuit(emit_qasm(c)) == c
