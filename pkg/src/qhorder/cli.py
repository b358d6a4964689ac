"""Command-line entry point with machine-readable JSON run reports.

Exit codes: 0 success / Unknown-with-witness, 1 no classical homomorphism,
2 input error, 3 quantum-infeasible certificate, 4 lemma verification failure.
Reports are byte-identical across runs for fixed inputs except for the
"timings" field.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import time
from pathlib import Path

from .gadgets import (
    SPINE_COLORS,
    ReplacementGraph,
    build_indicator,
    colored_walks,
    endpoint_certificate,
    replace,
    replacement_from_json,
    replacement_to_json,
    roles_from_labels,
    verify_structural,
    StructuralDefectError,
)
from .graphs import Digraph, Graph, GraphError, dicycles_to_digraph, parse, serialize, to_dot
from .homsolver import find_hom
from .posets import (
    PosetError,
    encode,
    order_check_D,
    phi,
    poset,
    verify_embedding,
)
from .prune import INFEASIBLE, RULE_REGISTRY, prune_closure

EXIT_OK = 0
EXIT_NO_HOM = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY_FAIL = 4

__all__ = ["main"]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load_any(path: Path):
    text = path.read_text()
    try:
        probe = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: invalid JSON: {exc}") from exc
    if isinstance(probe, dict) and probe.get("kind") == "replacement":
        return replacement_from_json(text)
    return parse(text)


def _plain(obj):
    return obj.graph if isinstance(obj, ReplacementGraph) else obj


def _write_graph(g, path: Path, fmt: str) -> None:
    path.write_text(to_dot(g) if fmt == "dot" else serialize(g))


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def _report(command: str, inputs: dict[str, Path], started: float) -> dict:
    return {
        "command": command,
        "inputs": {str(p): _sha256(p) for p in inputs.values()},
        "verdicts": {},
        "outputs": {},
        "timings": {"seconds": round(time.perf_counter() - started, 6)},
    }


def _cmd_check_hom(args) -> tuple[int, dict]:
    started = time.perf_counter()
    src_path, dst_path = Path(args.source), Path(args.target)
    x = _plain(_load_any(src_path))
    y = _plain(_load_any(dst_path))
    witness = find_hom(x, y)
    report = _report("check-hom", {"source": src_path, "target": dst_path}, started)
    report["verdicts"]["hom"] = witness is not None
    if witness is not None and args.witness:
        Path(args.witness).write_text(json.dumps(witness, indent=2, sort_keys=True) + "\n")
        report["outputs"]["witness"] = args.witness
    return (EXIT_OK if witness is not None else EXIT_NO_HOM), report


def _cmd_qprune(args) -> tuple[int, dict]:
    started = time.perf_counter()
    src_path, dst_path = Path(args.source), Path(args.target)
    src = _load_any(src_path)
    dst = _load_any(dst_path)
    rules = tuple(args.rules.split(",")) if args.rules else None
    source_roles = None
    if isinstance(src, (Graph, Digraph)) and isinstance(src, Graph):
        derived = roles_from_labels(src)
        if derived.role:
            source_roles = derived
    ledger = prune_closure(src, dst, bound=args.bound, rules=rules, source_roles=source_roles)
    report = _report("qprune", {"source": src_path, "target": dst_path}, started)
    report["verdicts"]["verdict"] = ledger.verdict
    report["verdicts"]["zero_pairs"] = ledger.zero_count
    report["verdicts"]["bound"] = ledger.config.bound
    report["verdicts"]["rules"] = list(ledger.config.rules)
    if args.trace:
        entries = [
            {"x": e.x, "y": e.y, "rule": e.rule, "detail": list(e.detail)} for e in ledger.trace
        ]
        Path(args.trace).write_text(json.dumps(entries, indent=2) + "\n")
        report["outputs"]["trace"] = args.trace
    return (EXIT_INFEASIBLE if ledger.verdict == INFEASIBLE else EXIT_OK), report


def _cmd_build_indicator(args) -> tuple[int, dict]:
    started = time.perf_counter()
    ind = build_indicator()
    out = Path(args.out)
    _write_graph(ind.graph, out, args.format)
    report = _report("build-indicator", {}, started)
    report["outputs"]["graph"] = args.out
    report["verdicts"].update(
        {
            "vertices": len(ind.graph.vertices),
            "edges": len(ind.graph.edges),
            "spine_colors": list(ind.spine_colors()),
        }
    )
    return EXIT_OK, report


def _cmd_replace(args) -> tuple[int, dict]:
    started = time.perf_counter()
    host_path = Path(args.host)
    host = _load_any(host_path)
    if not isinstance(host, Digraph):
        raise GraphError("replacement host must be a digraph")
    y = replace(host)
    _write_graph(y.graph, Path(args.out), args.format)
    Path(args.meta).write_text(replacement_to_json(y))
    report = _report("replace", {"host": host_path}, started)
    report["outputs"].update({"graph": args.out, "meta": args.meta})
    report["verdicts"].update(
        {"vertices": len(y.graph.vertices), "edges": len(y.graph.edges), "copies": len(y.copies)}
    )
    return EXIT_OK, report


def _cmd_verify_lemmas(args) -> tuple[int, dict]:
    started = time.perf_counter()
    meta_path = Path(args.meta)
    y = replacement_from_json(meta_path.read_text())
    structural = verify_structural(y)
    walks = colored_walks(y, SPINE_COLORS)
    spines = sorted(rec.spine for rec in y.copies.values())
    walks_ok = sorted(walks) == spines
    try:
        certificate = sorted(endpoint_certificate(y))
        certificate_ok = True
    except StructuralDefectError:
        certificate = []
        certificate_ok = False
    ok = structural.ok and walks_ok and certificate_ok
    report = _report("verify-lemmas", {"meta": meta_path}, started)
    report["verdicts"].update(
        {
            "ok": ok,
            "structural_ok": structural.ok,
            "spine_walks_ok": walks_ok,
            "certificate_ok": certificate_ok,
            "certificate": [list(a) for a in certificate],
        }
    )
    report["counterexamples"] = {
        "neighborhood": [[v, list(c)] for v, c in structural.neighborhood_violations],
        "a_pairs": [[v, list(e)] for v, e in structural.a_pair_violations],
        "b_pairs": [[v, list(e)] for v, e in structural.b_pair_violations],
        "role_mismatches": [list(m) for m in structural.role_mismatches],
    }
    return (EXIT_OK if ok else EXIT_VERIFY_FAIL), report


def _load_poset(path: Path):
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise PosetError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "elements" not in data or "leq" not in data:
        raise PosetError('poset JSON needs "elements" and "leq"')
    return poset(data["elements"], [tuple(p) for p in data["leq"]])


def _emit_embedding_graphs(emb, phis, out_dir: Path, fmt: str, report: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for x in emb.poset.elements:
        stem = _safe_name(x)
        d_path = out_dir / f"D_{stem}.json"
        _write_graph(dicycles_to_digraph(emb.cycles[x]), d_path, fmt)
        report["outputs"][f"D_{x}"] = str(d_path)
        if phis is not None:
            g_path = out_dir / f"phi_{stem}.json"
            m_path = out_dir / f"phi_{stem}.meta.json"
            _write_graph(phis[x].graph, g_path, fmt)
            m_path.write_text(replacement_to_json(phis[x]))
            report["outputs"][f"phi_{x}"] = str(g_path)
            report["outputs"][f"phi_{x}_meta"] = str(m_path)


def _embedding_rows(ver) -> list[dict]:
    return [
        {"x": r.x, "y": r.y, "comparable": r.comparable, "mode": r.mode, "ok": r.ok}
        for r in ver.rows
    ]


def _order_rows(ocr) -> list[dict]:
    return [
        {
            "x": r.x,
            "y": r.y,
            "expected": r.expected,
            "oracle": r.oracle,
            "solver": r.solver,
            "prune": r.prune_verdict,
            "consistent": r.consistent,
        }
        for r in ocr.rows
    ]


def _cmd_embed_poset(args) -> tuple[int, dict]:
    started = time.perf_counter()
    p_path = Path(args.poset)
    p = _load_poset(p_path)
    seed = args.seed if args.randomize_primes else None
    emb = encode(p, seed=seed)
    ocr = order_check_D(p, emb)
    report = _report("embed-poset", {"poset": p_path}, started)
    report["verdicts"]["order_check_ok"] = ocr.ok
    report["verdicts"]["lengths"] = {x: emb.lengths[x] for x in p.elements}
    report["pairs"] = _order_rows(ocr)
    ok = ocr.ok
    phis = None
    if args.level == "phi":
        phis = {x: phi(emb, x) for x in p.elements}
        ver = verify_embedding(p, emb=emb, phis=phis)
        report["verdicts"]["realized"] = ver.realized
        report["embedding"] = _embedding_rows(ver)
        ok = ok and ver.realized
    if args.out_dir:
        _emit_embedding_graphs(emb, phis, Path(args.out_dir), args.format, report)
    Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return (EXIT_OK if ok else EXIT_VERIFY_FAIL), report


def _cmd_demo_universality(args) -> tuple[int, dict]:
    started = time.perf_counter()
    p_path = Path(args.poset)
    p = _load_poset(p_path)
    emb = encode(p)
    ocr = order_check_D(p, emb)
    phis = {x: phi(emb, x) for x in p.elements}
    ver = verify_embedding(p, emb=emb, phis=phis)
    report = _report("demo-universality", {"poset": p_path}, started)
    report["verdicts"].update(
        {
            "order_check_ok": ocr.ok,
            "realized": ver.realized,
            "lengths": {x: emb.lengths[x] for x in p.elements},
        }
    )
    report["pairs"] = _order_rows(ocr)
    report["embedding"] = _embedding_rows(ver)
    out_dir = Path(args.out_dir)
    _emit_embedding_graphs(emb, phis, out_dir, args.format, report)
    report_path = out_dir / "report.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    report["outputs"]["report"] = str(report_path)
    ok = ocr.ok and ver.realized
    return (EXIT_OK if ok else EXIT_VERIFY_FAIL), report


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="qhorder")
    sub = top.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-hom", help="decide classical homomorphism existence")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--witness", help="write the witness mapping to this JSON file")
    s.set_defaults(handler=_cmd_check_hom)

    s = sub.add_parser("qprune", help="run the zero-forcing rules to a fixed point")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--bound", type=int, default=None, help="walk-length bound")
    s.add_argument("--rules", help=f"comma-separated subset of {','.join(sorted(RULE_REGISTRY))}")
    s.add_argument("--trace", help="write the derivation trace to this JSON file")
    s.set_defaults(handler=_cmd_qprune)

    s = sub.add_parser("build-indicator", help="emit the ordered two-terminal indicator")
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("json", "dot"), default="json")
    s.set_defaults(handler=_cmd_build_indicator)

    s = sub.add_parser("replace", help="substitute every host arc by an indicator copy")
    s.add_argument("host")
    s.add_argument("--out", required=True)
    s.add_argument("--meta", required=True)
    s.add_argument("--format", choices=("json", "dot"), default="json")
    s.set_defaults(handler=_cmd_replace)

    s = sub.add_parser("verify-lemmas", help="verify the structural guarantees of a replacement")
    s.add_argument("meta")
    s.set_defaults(handler=_cmd_verify_lemmas)

    s = sub.add_parser("embed-poset", help="realize a finite poset in the homomorphism order")
    s.add_argument("poset")
    s.add_argument("--level", choices=("D", "phi"), default="D")
    s.add_argument("--out-dir")
    s.add_argument("--report", required=True)
    s.add_argument("--format", choices=("json", "dot"), default="json")
    s.add_argument("--randomize-primes", action="store_true")
    s.add_argument("--seed", type=int)
    s.set_defaults(handler=_cmd_embed_poset)

    s = sub.add_parser("demo-universality", help="encode, order-check and realize a poset end to end")
    s.add_argument("poset")
    s.add_argument("--out-dir", default="universality-out")
    s.add_argument("--format", choices=("json", "dot"), default="json")
    s.set_defaults(handler=_cmd_demo_universality)
    return top


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "randomize_primes", False) and args.seed is None:
        _emit({"command": args.command, "error": "--randomize-primes requires an explicit --seed"})
        return EXIT_INPUT
    try:
        code, report = args.handler(args)
    except (GraphError, PosetError, OSError, ValueError) as exc:
        _emit({"command": args.command, "error": str(exc)})
        return EXIT_INPUT
    _emit(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
