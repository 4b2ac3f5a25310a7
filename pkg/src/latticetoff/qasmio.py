"""OpenQASM 2.0 subset and lossless JSON serialisation of circuits.

QASM has no fan-out primitive, so a multi-target CNOT is written as a
``// fanout k`` comment, a barrier over its qubits, ``k`` consecutive ``cx``
statements sharing the control, and a closing barrier.  Qubit labels travel
in a leading ``// qubits:`` comment.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

import jsonschema

from .circuit import Circuit, CircuitError, Gate, GateKind, Qubit, Role, infer_role

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";'
JSON_FORMAT = "latticetoff-circuit"
JSON_VERSION = 1

_SIMPLE = {"h", "x", "z", "s", "sdg", "t", "tdg"}
_TWO = {"cz", "swap"}


class QasmError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


# -- emit -------------------------------------------------------------------


def emit_qasm(c: Circuit) -> str:
    out = [HEADER, "// qubits: " + " ".join(f"{q.label}:{q.role.value}" for q in c.qubits)]
    out.append(f"qreg q[{c.n}];")
    if c.num_clbits:
        out.append(f"creg c[{c.num_clbits}];")

    def ref(i: int) -> str:
        return f"q[{i}]"

    for g in c.gates:
        prefix = ""
        if g.condition is not None:
            if c.num_clbits != 1:
                raise QasmError("classically controlled gates need a single one-bit classical register")
            if g.kind not in (GateKind.Z, GateKind.CZ):
                raise QasmError(f"only z/cz may be classically controlled, got {g.kind.value}")
            prefix = "if(c==1) "
        if g.kind is GateKind.CX:
            if len(g.targets) == 1:
                out.append(f"{prefix}cx {ref(g.control)},{ref(g.targets[0])};")
                continue
            if prefix:
                raise QasmError("a classically controlled fan-out cannot be written")
            span = ",".join(ref(q) for q in g.qubits)
            out.append(f"// fanout {len(g.targets)}")
            out.append(f"barrier {span};")
            out.extend(f"cx {ref(g.control)},{ref(t)};" for t in g.targets)
            out.append(f"barrier {span};")
        elif g.kind is GateKind.MEASURE_Z:
            out.append(f"measure {ref(g.qubits[0])} -> c[{g.cbit}];")
        elif g.kind is GateKind.MEASURE_X:
            q = ref(g.qubits[0])
            out.extend([f"h {q};", f"measure {q} -> c[{g.cbit}];", f"h {q};"])
        else:
            out.append(f"{prefix}{g.kind.value} " + ",".join(ref(q) for q in g.qubits) + ";")
    return "\n".join(out) + "\n"


# -- parse ------------------------------------------------------------------


_TOKEN = re.compile(
    r"""
    (?P<comment>//[^\n]*)
  | (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<eqeq>==)
  | (?P<number>\d+(\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[;,\[\]()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise QasmError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.comments: list[_Tok] = []
        self.qreg: tuple[str, int] | None = None
        self.implicit = False  # register inferred from use, no qreg statement
        self.creg: tuple[str, int] | None = None

    def peek(self) -> _Tok:
        while self.toks[self.i].kind == "comment":
            self.comments.append(self.toks[self.i])
            self.i += 1
        return self.toks[self.i]

    def take(self, kind: str | None = None, text: str | None = None) -> _Tok:
        tok = self.peek()
        if (kind and tok.kind != kind) or (text and tok.text != text):
            want = text or kind
            got = tok.text or "end of input"
            raise QasmError(f"expected {want!r}, found {got!r}", tok.line, tok.col)
        self.i += 1
        return tok

    def qubit_ref(self) -> int:
        name = self.take("ident")
        if self.qreg is None:
            self.qreg, self.implicit = (name.text, 0), True
        if name.text != self.qreg[0]:
            raise QasmError(f"unknown quantum register {name.text!r}", name.line, name.col)
        self.take("punct", "[")
        idx = self.take("number")
        self.take("punct", "]")
        value = int(idx.text)
        if self.implicit:
            self.qreg = (name.text, max(self.qreg[1], value + 1))
        elif value >= self.qreg[1]:
            raise QasmError(f"qubit index {value} out of range (size {self.qreg[1]})", idx.line, idx.col)
        return value

    def cbit_ref(self) -> int:
        name = self.take("ident")
        if self.creg is None or name.text != self.creg[0]:
            raise QasmError(f"unknown classical register {name.text!r}", name.line, name.col)
        self.take("punct", "[")
        idx = self.take("number")
        self.take("punct", "]")
        value = int(idx.text)
        if value >= self.creg[1]:
            raise QasmError(f"classical bit {value} out of range (size {self.creg[1]})", idx.line, idx.col)
        return value

    def operands(self) -> list[int]:
        refs = [self.qubit_ref()]
        while self.peek().text == ",":
            self.take("punct", ",")
            refs.append(self.qubit_ref())
        return refs


@dataclass
class _Stmt:
    kind: str  # gate name, "barrier" or "measure"
    qubits: list[int]
    cbit: int | None
    condition: bool
    tok: _Tok
    comments_before: list[_Tok]


def parse_qasm(text: str) -> Circuit:
    """Parse the supported OpenQASM 2.0 subset back into a circuit.

    The version header and the ``qreg`` declaration may be omitted for
    snippets; an undeclared register is sized by its largest index.
    """
    if not text.strip():
        raise QasmError("empty input", 1, 1)
    p = _Parser(text)
    if p.peek().text == "OPENQASM":
        p.take("ident", "OPENQASM")
        version = p.take("number")
        if version.text != "2.0":
            raise QasmError(f"unsupported version {version.text}", version.line, version.col)
        p.take("punct", ";")
    stmts: list[_Stmt] = []
    while True:
        mark = p.i
        if p.peek().kind == "eof":
            break
        tok = p.take("ident")
        before = [t for t in p.toks[mark:p.i] if t.kind == "comment"]
        word = tok.text
        if word == "include":
            p.take("string")
            p.take("punct", ";")
            continue
        if word in ("qreg", "creg"):
            name = p.take("ident")
            p.take("punct", "[")
            size = int(p.take("number").text)
            p.take("punct", "]")
            p.take("punct", ";")
            slot = "qreg" if word == "qreg" else "creg"
            if getattr(p, slot) is not None:
                problem = "declared after use" if slot == "qreg" and p.implicit else "only one is supported"
                raise QasmError(f"{word}: {problem}", tok.line, tok.col)
            setattr(p, slot, (name.text, size))
            continue
        condition = False
        if word == "if":
            p.take("punct", "(")
            reg = p.take("ident")
            if p.creg is None or reg.text != p.creg[0]:
                raise QasmError(f"unknown classical register {reg.text!r}", reg.line, reg.col)
            p.take("eqeq")
            val = p.take("number")
            if val.text != "1" or p.creg[1] != 1:
                raise QasmError("only if(c==1) on a one-bit register is supported", val.line, val.col)
            p.take("punct", ")")
            condition = True
            tok = p.take("ident")
            word = tok.text
            if word not in ("z", "cz"):
                raise QasmError(f"only z/cz may be classically controlled, got {word!r}", tok.line, tok.col)
        if word == "measure":
            q = p.qubit_ref()
            p.take("arrow")
            cb = p.cbit_ref()
            p.take("punct", ";")
            stmts.append(_Stmt("measure", [q], cb, False, tok, before))
            continue
        if word not in _SIMPLE | _TWO | {"cx", "barrier"}:
            raise QasmError(f"unsupported gate {word!r}", tok.line, tok.col)
        qs = p.operands()
        p.take("punct", ";")
        arity = 1 if word in _SIMPLE else 2 if word in _TWO | {"cx"} else None
        if arity is not None and len(qs) != arity:
            raise QasmError(f"{word} takes {arity} operand(s), got {len(qs)}", tok.line, tok.col)
        if len(set(qs)) != len(qs):
            raise QasmError(f"repeated operand in {word}", tok.line, tok.col)
        stmts.append(_Stmt(word, qs, None, condition, tok, before))
    if p.qreg is None:
        raise QasmError("no qubits declared or used", 1, 1)
    return _assemble(stmts, p)


_FANOUT = re.compile(r"//\s*fanout\s+(\d+)\s*$")
_LABELS = re.compile(r"//\s*qubits:\s*(.*)$")


def _qubits_from_comments(p: _Parser, n: int) -> tuple[Qubit, ...]:
    for tok in p.comments:
        m = _LABELS.match(tok.text)
        if m:
            qubits = []
            for item in m.group(1).split():
                label, _, role = item.partition(":")
                qubits.append(Qubit(label, Role(role) if role else infer_role(label)))
            if len(qubits) != n:
                raise QasmError(f"label comment names {len(qubits)} qubits, register has {n}", tok.line, tok.col)
            return tuple(qubits)
    return tuple(Qubit(f"q{i}", Role.GENERIC) for i in range(n))


def _assemble(stmts: list[_Stmt], p: _Parser) -> Circuit:
    gates: list[Gate] = []
    i = 0
    while i < len(stmts):
        st = stmts[i]
        fan = next((int(m.group(1)) for m in (_FANOUT.match(c.text) for c in st.comments_before) if m), None)
        if fan is not None and st.kind == "barrier":
            body = stmts[i + 1:i + 1 + fan]
            closing = stmts[i + 1 + fan] if i + 1 + fan < len(stmts) else None
            if (
                len(body) != fan
                or any(b.kind != "cx" or b.condition for b in body)
                or len({b.qubits[0] for b in body}) != 1
                or closing is None
                or closing.kind != "barrier"
            ):
                raise QasmError("malformed fanout group", st.tok.line, st.tok.col)
            gates.append(Gate(GateKind.CX, (body[0].qubits[0], *(b.qubits[1] for b in body))))
            i += fan + 2
            continue
        if st.kind == "barrier":
            i += 1
            continue
        if st.kind == "measure":
            gates.append(Gate(GateKind.MEASURE_Z, tuple(st.qubits), cbit=st.cbit))
        else:
            gates.append(Gate(GateKind(st.kind), tuple(st.qubits), condition=0 if st.condition else None))
        i += 1
    n = p.qreg[1]
    try:
        return Circuit(_qubits_from_comments(p, n), tuple(gates), p.creg[1] if p.creg else 0)
    except CircuitError as exc:
        raise QasmError(str(exc)) from exc


# -- JSON -------------------------------------------------------------------

_GATE_SCHEMA = {
    "type": "object",
    "required": ["op"],
    "properties": {
        "op": {"enum": [k.value for k in GateKind]},
        "qubits": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "control": {"type": "string"},
        "targets": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "cbit": {"type": "integer", "minimum": 0},
        "if": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["format", "version", "qubits", "clbits", "gates"],
    "properties": {
        "format": {"const": JSON_FORMAT},
        "version": {"const": JSON_VERSION},
        "name": {"type": "string"},
        "qubits": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "role"],
                "properties": {"label": {"type": "string"}, "role": {"enum": [r.value for r in Role]}},
                "additionalProperties": False,
            },
        },
        "clbits": {"type": "integer", "minimum": 0},
        "gates": {"type": "array", "items": _GATE_SCHEMA},
    },
    "additionalProperties": False,
}


class SchemaError(ValueError):
    pass


def circuit_to_dict(c: Circuit, name: str | None = None) -> dict:
    labels = c.labels
    gates = []
    for g in c.gates:
        if g.kind is GateKind.CX:
            d = {"op": "cx", "control": labels[g.control], "targets": [labels[t] for t in g.targets]}
        else:
            d = {"op": g.kind.value, "qubits": [labels[q] for q in g.qubits]}
        if g.cbit is not None:
            d["cbit"] = g.cbit
        if g.condition is not None:
            d["if"] = g.condition
        gates.append(d)
    doc = {
        "format": JSON_FORMAT,
        "version": JSON_VERSION,
        "qubits": [{"label": q.label, "role": q.role.value} for q in c.qubits],
        "clbits": c.num_clbits,
        "gates": gates,
    }
    if name:
        doc["name"] = name
    return doc


def emit_json(c: Circuit, name: str | None = None) -> str:
    return json.dumps(circuit_to_dict(c, name), indent=2) + "\n"


def circuit_from_dict(doc: dict) -> Circuit:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise SchemaError(f"{path or '<root>'}: {exc.message}") from None
    qubits = tuple(Qubit(q["label"], Role(q["role"])) for q in doc["qubits"])
    index = {q.label: i for i, q in enumerate(qubits)}

    def idx(label: str) -> int:
        if label not in index:
            raise SchemaError(f"unknown qubit label {label!r}")
        return index[label]

    gates = []
    for d in doc["gates"]:
        if d["op"] == "cx":
            if "control" not in d or "targets" not in d:
                raise SchemaError("cx needs 'control' and 'targets'")
            qs = (idx(d["control"]), *(idx(t) for t in d["targets"]))
        else:
            if "qubits" not in d:
                raise SchemaError(f"{d['op']} needs 'qubits'")
            qs = tuple(idx(q) for q in d["qubits"])
        try:
            gates.append(Gate(GateKind(d["op"]), qs, d.get("cbit"), d.get("if")))
        except CircuitError as exc:
            raise SchemaError(str(exc)) from None
    try:
        return Circuit(qubits, tuple(gates), doc["clbits"])
    except CircuitError as exc:
        raise SchemaError(str(exc)) from None


def parse_json(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return circuit_from_dict(doc)


def load_circuit(text: str) -> Circuit:
    """Parse either format, sniffing JSON by its leading brace."""
    if text.lstrip().startswith("{"):
        return parse_json(text)
    return parse_qasm(text)
