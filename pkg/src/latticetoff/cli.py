"""``latticetoff`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
Set ``LATTICETOFF_COLOR=0`` to disable ANSI colour.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import acceptance, arch, qasmio, sim
from .circuit import Circuit, CircuitError, asap_schedule, format_schedule, metrics
from .constructions import REGISTRY, build
from .phasepoly import ExtractionError, extract
from .ring import RingScalar, UnitaryMatrix

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

METRIC_KEYS = ("depth_multi", "depth_serial", "t_count", "t_depth", "cnot_steps", "swap_count", "max_interaction_degree")
COMPARE_KEYS = (
    "name", "qubits", "t_count", "t_depth", "max_interaction_degree",
    "embeddable", "swap_count", "routed_depth_serial", "routed_cnot_count",
)
PHASE_NAMES = {0: "1", 1: "w", 2: "i", 3: "w^3", 4: "-1", 5: "w^5", 6: "-i", 7: "w^7"}


class UsageError(Exception):
    """Bad input from the command line; maps to exit code 2."""


def _colour_enabled() -> bool:
    return os.environ.get("LATTICETOFF_COLOR", "1") != "0" and sys.stdout.isatty()


def _status(ok: bool) -> str:
    word = "PASS" if ok else "FAIL"
    if _colour_enabled():
        return f"\033[{32 if ok else 31}m{word}\033[0m"
    return word


def load(ref: str) -> tuple[str, Circuit]:
    """A registry name, or a path to a QASM/JSON file."""
    if ref in REGISTRY:
        return ref, build(ref).circuit
    path = Path(ref)
    if not path.is_file():
        raise UsageError(f"{ref!r} is neither a construction ({', '.join(REGISTRY)}) nor a readable file")
    return path.stem, qasmio.load_circuit(path.read_text())


def load_unitary(path: str) -> UnitaryMatrix:
    """JSON ``{"entries": [[e, ...], ...]}``; each entry an int or ``[a, b, c, d, k]``."""
    try:
        doc = json.loads(Path(path).read_text())
        rows = [[RingScalar.from_int(e) if isinstance(e, int) else RingScalar(*e) for e in row] for row in doc["entries"]]
        u = UnitaryMatrix.from_entries(rows)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read unitary file {path!r}: {exc}") from None
    if not u.is_unitary():
        raise UsageError(f"matrix in {path!r} is not unitary")
    return u


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------


def cmd_build(args: argparse.Namespace) -> int:
    if args.name not in REGISTRY:
        raise UsageError(f"unknown construction {args.name!r}; known: {', '.join(REGISTRY)}")
    c = build(args.name).circuit
    text = qasmio.emit_json(c, args.name) + "\n" if args.format == "json" else qasmio.emit_qasm(c)
    _emit(text, args.out)
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    name, c = load(args.circuit)
    m = metrics(c).as_dict()
    if args.json:
        print(json.dumps({"name": name, **m}, sort_keys=True))
        return EXIT_OK
    print(f"{name}: {c.n} qubits, {len(c.gates)} gates")
    for key, value in m.items():
        print(f"  {key:<24}{value}")
    if args.schedule:
        print(format_schedule(c, asap_schedule(c)))
    if args.poly:
        core = build(name).core if args.circuit in REGISTRY else None
        try:
            poly, _ = extract(core if core is not None else c)
            where = " (diagonal core)" if core is not None else ""
            print(f"  phase polynomial{where}  {poly.render()}")
        except ExtractionError as exc:
            print(f"  phase polynomial        n/a ({exc})")
    return EXIT_OK


def _reference(against: str) -> UnitaryMatrix:
    refs = {"toffoli": sim.ccx_matrix, "and": sim.ccx_matrix, "cs": sim.cs_matrix, "ccz": sim.ccz_matrix}
    if against in refs:
        return refs[against]()
    return load_unitary(against)


def _ket(bits: Sequence[int]) -> str:
    return "|" + "".join(map(str, bits)) + ">"


def cmd_verify(args: argparse.Namespace) -> int:
    name, c = load(args.circuit)
    target = _reference(args.against)
    data = [q for q in range(c.n) if q not in c.ancillae]
    if target.n != len(data):
        raise UsageError(f"reference acts on {target.n} qubits but {name} has {len(data)} data qubits")
    if c.has_measurement:
        check = sim.check_branch_proportionality(c, target)
        print(f"{_status(check.ok)} {name} vs {args.against} (branch-proportionality mode)")
        for outcome, lam in check.constants.items():
            print(f"  outcome {outcome}: lambda = {lam}  |lambda|^2 = {lam.abs2().to_fraction()}")
        if not check.ok:
            print(f"  {check.reason}")
        return EXIT_OK if check.ok else EXIT_FAIL
    zero = [c.index("t")] if args.against == "and" and "t" in c.labels else []
    mm = sim.find_ancilla_zero_mismatch(c, target, c.ancillae, zero_inputs=zero)
    mode = "ancilla-zero" if c.ancillae else "exact"
    if mm is None:
        print(f"{_status(True)} {name} equals {args.against} ({mode} semantics, exact arithmetic)")
        return EXIT_OK
    labels = " ".join(c.labels[q] for q in data)
    print(f"{_status(False)} {name} differs from {args.against} ({mode} semantics)")
    if mm.phase is not None:
        print(f"  counterexample {_ket(mm.data_bits)} ({labels}): output = {PHASE_NAMES[mm.phase]} * expected")
    else:
        print(f"  counterexample {_ket(mm.data_bits)} ({labels}): output is not a phase multiple of expected")
        for tag, vec in (("got", mm.got), ("expected", mm.expected)):
            amps = ", ".join(f"{_ket(sim.index_to_bits(i, c.n))}: {a}" for i, a in vec.amplitudes().items())
            print(f"    {tag}: {amps}")
    return EXIT_FAIL


def cmd_map(args: argparse.Namespace) -> int:
    name, c = load(args.circuit)
    g = arch.parse_arch(args.arch)
    if args.tile:
        base = arch.find_grid_embedding(c, arch.grid(3, 2))
        if base is None:
            print(f"{name}: no embedding in a 3x2 block, cannot tile")
            return EXIT_FAIL
        tiles = arch.tile(base, g)
        print(f"{name} on {args.arch}: {len(tiles)} tiles of 3x2")
        for i, p in enumerate(tiles):
            print(f"  tile {i}: {'executable' if arch.is_executable(c, g, p) else 'NOT executable'} at {sorted(p.values())[0]}")
        merged = {f"{lb}.{i}": v for i, p in enumerate(tiles) for lb, v in p.items()}
        used = set().union(*(arch.used_couplers(c, p) for p in tiles)) if tiles else set()
        print(arch.render_grid(g, merged, used))
        if args.figure:
            from .plotting import plot_placement

            print(f"wrote {plot_placement(g, tiles, c, args.figure, f'{name}: {len(tiles)} tiles')}")
        return EXIT_OK
    emb = arch.find_grid_embedding(c, g)
    if emb is None:
        print(f"{name} on {args.arch}: no embedding")
        return EXIT_FAIL
    swaps = arch.route_greedy(c, g, emb).swap_count
    print(f"{name} on {args.arch}: embedding found, {swaps} SWAPs")
    print("  " + ", ".join(f"{lb}->{v}" for lb, v in emb.items()))
    print(arch.render_grid(g, emb, arch.used_couplers(c, emb)))
    if args.figure:
        from .plotting import plot_placement

        print(f"wrote {plot_placement(g, [emb], c, args.figure, f'{name} on {args.arch}')}")
    return EXIT_OK


def compare_row(name: str, c: Circuit, g, limit: int) -> dict[str, object]:
    m = metrics(c)
    emb = arch.find_grid_embedding(c, g) if c.n <= arch.MAX_EMBED_QUBITS else None
    r = arch.best_routing(c, g, limit=limit)
    return {
        "name": name,
        "qubits": c.n,
        "t_count": m.t_count,
        "t_depth": m.t_depth,
        "max_interaction_degree": m.max_interaction_degree,
        "embeddable": emb is not None,
        "swap_count": r.swap_count,
        "routed_depth_serial": metrics(r.circuit).depth_serial,
        "routed_cnot_count": r.cnot_count_serial,
    }


def _table(rows: list[dict[str, object]], keys: Sequence[str]) -> str:
    cells = [[str(k) for k in keys]] + [[str(r[k]) for k in keys] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(keys))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells)


def cmd_compare(args: argparse.Namespace) -> int:
    g = arch.parse_arch(args.arch)
    rows = [compare_row(*load(ref), g, args.limit) for ref in (args.a, args.b)]
    if args.json:
        print(json.dumps({"arch": args.arch, "rows": rows}, sort_keys=True))
    else:
        print(f"routing on {args.arch} (SWAP = 3 CNOTs in the CNOT count)")
        print(_table(rows, COMPARE_KEYS))
    if args.figure:
        from .plotting import plot_metrics

        keys = ["swap_count", "routed_depth_serial", "routed_cnot_count", "max_interaction_degree"]
        print(f"wrote {plot_metrics(rows, keys, args.figure, f'routed on {args.arch}')}")
    return EXIT_OK


def cmd_selfcheck(args: argparse.Namespace) -> int:
    results = acceptance.run_all()
    for name, ok, detail in results:
        print(f"{_status(ok)} {name}: {detail}")
    passed = sum(ok for _, ok, _ in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


def _csv(rows: list[dict[str, object]], keys: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(keys), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_report(args: argparse.Namespace) -> int:
    from .plotting import plot_metrics, plot_placement

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    metric_rows = []
    for name in REGISTRY:
        c = build(name).circuit
        metric_rows.append({"name": name, "qubits": c.n, **metrics(c).as_dict()})
    metric_keys = ["name", "qubits", *metrics(build("cs").circuit).as_dict()]
    g = arch.parse_arch(args.arch)
    routing_rows = [compare_row(name, build(name).circuit, g, args.limit) for name in args.routed]

    sections = {"metrics": (metric_rows, metric_keys), "routing": (routing_rows, COMPARE_KEYS)}
    for section, (rows, keys) in sections.items():
        text = _csv(rows, keys)
        (out / f"{section}.csv").write_text(text)
        print(f"--- {section} ---")
        sys.stdout.write(text)
    print("--- figures ---")
    headline = build("paper-toffoli").circuit
    block = arch.grid(3, 2)
    figures = [
        plot_placement(block, [arch.find_grid_embedding(headline, block)], headline, out / "placement_paper-toffoli.png",
                       "paper-toffoli on grid 3x2"),
        plot_placement(arch.grid(6, 4), arch.tile(arch.find_grid_embedding(headline, block), arch.grid(6, 4)), headline,
                       out / "tiling_6x4.png", "paper-toffoli tiled on grid 6x4"),
        plot_metrics(metric_rows, ["t_count", "t_depth", "depth_multi", "depth_serial", "max_interaction_degree"],
                     out / "metrics.png", "construction metrics"),
        plot_metrics(routing_rows, ["swap_count", "routed_depth_serial", "routed_cnot_count"],
                     out / "routing.png", f"routed on {args.arch}"),
    ]
    for f in figures:
        print(f)
    return EXIT_OK


# -- entry point ------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latticetoff", description="Exact Clifford+T Toffoli toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="emit a named construction")
    b.add_argument("name")
    b.add_argument("--out")
    b.add_argument("--format", choices=("qasm", "json"), default="qasm")
    b.set_defaults(func=cmd_build)

    m = sub.add_parser("metrics", help="depth, T-count, T-depth and connectivity metrics")
    m.add_argument("circuit", help="construction name or QASM/JSON file")
    m.add_argument("--json", action="store_true")
    m.add_argument("--schedule", action="store_true", help="also print the ASAP layers")
    m.add_argument("--poly", action="store_true", help="also print the phase polynomial when defined")
    m.set_defaults(func=cmd_metrics)

    v = sub.add_parser("verify", help="exact equivalence check against a reference")
    v.add_argument("circuit")
    v.add_argument("--against", default="toffoli", help="toffoli, and, cs, ccz, or a unitary JSON file")
    v.set_defaults(func=cmd_verify)

    mp = sub.add_parser("map", help="embed onto a coupling graph")
    mp.add_argument("circuit")
    mp.add_argument("--arch", default="grid:3x2")
    mp.add_argument("--tile", action="store_true")
    mp.add_argument("--figure", help="write a PNG of the placement")
    mp.set_defaults(func=cmd_map)

    cp = sub.add_parser("compare", help="routing cost of two circuits side by side")
    cp.add_argument("a")
    cp.add_argument("b")
    cp.add_argument("--arch", default="grid:3x3")
    cp.add_argument("--limit", type=int, default=720, help="initial placements tried when no embedding exists")
    cp.add_argument("--json", action="store_true")
    cp.add_argument("--figure", help="write a PNG bar chart")
    cp.set_defaults(func=cmd_compare)

    s = sub.add_parser("selfcheck", help="run the acceptance checks")
    s.set_defaults(func=cmd_selfcheck)

    r = sub.add_parser("report", help="CSV tables and PNG figures for all constructions")
    r.add_argument("--out", default="report")
    r.add_argument("--arch", default="grid:3x2")
    r.add_argument("--routed", nargs="+", default=["paper-toffoli", "and", "cs", "rccx", "toffoli-7t"],
                   help="constructions to route")
    r.add_argument("--limit", type=int, default=720)
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, qasmio.QasmError, qasmio.SchemaError, arch.ArchError, CircuitError, sim.SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
