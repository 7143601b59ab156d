"""Command-line interface.

Subcommands: check (recognition verdict and witness), canon (canonical
code), iso (isomorphism with mapping), gen (random Dijkstra graph), batch
(similarity report over a directory).  Exit codes: 0 for a positive verdict
(DIJKSTRA / MATCH), 1 for a negative one, 2 for input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import errors
from .canonical import analyze, is_isomorphic
from .flowgraph import FlowGraph
from .formats import (
    FORMATS,
    GraphDocument,
    batch_analyze,
    detect_format,
    parse_graph,
    serialize_graph,
    verdict_diagnostic,
    verdict_label,
)
from .generator import generate_dg
from .recognizer import Status, Verdict, recognize, replay


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except errors.ParseError as exc:
        print(f"error: {getattr(args, 'current_file', '')}{exc}", file=sys.stderr)
        return 2
    except errors.DGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgraph",
        description="Recognize, fingerprint and compare control-flow graphs of structured programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--format",
            choices=FORMATS,
            default=None,
            help="file format (default: by extension, .dot/.gv means dot, else json)",
        )

    p_check = sub.add_parser("check", help="decide whether a flow graph is a Dijkstra graph")
    p_check.add_argument("file")
    add_format(p_check)
    p_check.add_argument("--witness", action="store_true", help="print the contraction trace")
    p_check.add_argument(
        "--verify-witness", action="store_true", help="replay the witness and confirm it"
    )
    p_check.add_argument("--quiet", action="store_true", help="suppress trace output")
    p_check.set_defaults(func=_cmd_check)

    p_canon = sub.add_parser("canon", help="print the canonical code of a Dijkstra graph")
    p_canon.add_argument("file")
    add_format(p_canon)
    p_canon.add_argument(
        "--provenance", action="store_true", help="also print the vertex behind every 1 token"
    )
    p_canon.add_argument("--quiet", action="store_true")
    p_canon.set_defaults(func=_cmd_canon)

    p_iso = sub.add_parser("iso", help="decide isomorphism of two Dijkstra graphs")
    p_iso.add_argument("file1")
    p_iso.add_argument("file2")
    add_format(p_iso)
    p_iso.add_argument("--quiet", action="store_true", help="suppress the vertex mapping")
    p_iso.set_defaults(func=_cmd_iso)

    p_gen = sub.add_parser("gen", help="generate a random Dijkstra graph")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--size", type=int, required=True, help="minimum vertex count")
    p_gen.add_argument(
        "--kinds",
        type=str,
        default=None,
        help="comma-separated statement kinds to draw from "
        "(sequence,if-then,if-then-else,p-case,while,repeat)",
    )
    p_gen.add_argument("-o", "--output", required=True, help="output file")
    add_format(p_gen)
    p_gen.add_argument("--quiet", action="store_true")
    p_gen.set_defaults(func=_cmd_gen)

    p_batch = sub.add_parser("batch", help="similarity report over a directory of graphs")
    p_batch.add_argument("directory")
    add_format(p_batch)
    p_batch.add_argument(
        "--mappings", action="store_true", help="include vertex mappings inside each code cluster"
    )
    p_batch.add_argument("--quiet", action="store_true")
    p_batch.set_defaults(func=_cmd_batch)
    return parser


def _load(path: str, fmt: str | None) -> GraphDocument:
    use = fmt or detect_format(path)
    data = Path(path).read_bytes()
    try:
        return parse_graph(data, use)
    except errors.ParseError as exc:
        raise errors.ParseError(exc.line, f"{path}: {exc.message}") from None


def _exit_code(verdict_positive: bool) -> int:
    return 0 if verdict_positive else 1


def _cmd_check(args: argparse.Namespace) -> int:
    try:
        doc = _load(args.file, args.format)
    except (errors.DuplicateVertex, errors.ParallelEdge, errors.SelfLoop) as exc:
        # malformed graph structure: not the flow graph of any program
        print(f"NOT-DIJKSTRA (malformed-input: {exc})")
        return 1
    verdict = recognize(doc.graph)
    label = verdict_label(verdict)
    if verdict.is_dijkstra:
        print(f"{label} (k={verdict.k})")
    else:
        print(f"{label} ({verdict_diagnostic(verdict)})")
    if args.witness and not args.quiet:
        for i, step in enumerate(verdict.trace, 1):
            members = ",".join(step.members)
            print(f"  step {i}: {step.kind} at {step.source}; members {members}; sink {step.sink}")
    if args.verify_witness:
        final = replay(doc.graph, verdict.trace)
        if verdict.is_dijkstra and not final.is_trivial:
            print("witness INVALID: replay does not reach the trivial graph", file=sys.stderr)
            return 2
        if not args.quiet:
            print(f"witness verified: replay ends with {final.n} vertices")
    return _exit_code(verdict.is_dijkstra)


def _cmd_canon(args: argparse.Namespace) -> int:
    doc = _load(args.file, args.format)
    verdict, code = analyze(doc.graph)
    if code is None:
        print(
            f"error: {args.file}: {verdict_label(verdict)} ({verdict_diagnostic(verdict)})",
            file=sys.stderr,
        )
        return 2
    print(code.line)
    if args.provenance and not args.quiet:
        for pos, vertex in sorted(code.provenance.items()):
            print(f"{pos} {vertex}")
    return 0


def _cmd_iso(args: argparse.Namespace) -> int:
    doc1 = _load(args.file1, args.format)
    doc2 = _load(args.file2, args.format)
    try:
        mapping = is_isomorphic(doc1.graph, doc2.graph)
    except errors.NotDijkstraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if mapping is None:
        print("NO-MATCH")
        return 1
    print("MATCH")
    if not args.quiet:
        for a, b in sorted(mapping.pairs):
            print(f"{a} -> {b}")
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    kinds = tuple(k.strip() for k in args.kinds.split(",")) if args.kinds else None
    graph, script = generate_dg(args.seed, args.size, kinds=kinds)
    name = Path(args.output).stem or "generated"
    doc = GraphDocument(name, graph, {"seed": str(args.seed)})
    fmt = args.format or detect_format(args.output)
    Path(args.output).write_text(serialize_graph(doc, fmt))
    script_path = args.output + ".script.json"
    Path(script_path).write_text(script.to_json())
    if not args.quiet:
        print(
            f"generated {name}: n={graph.n} m={graph.m} seed={args.seed} "
            f"-> {args.output} (script: {script_path})"
        )
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        print(f"error: {args.directory} is not a directory", file=sys.stderr)
        return 2
    items: list[tuple[str, str, GraphDocument | str]] = []
    paths = sorted(
        p for p in root.iterdir() if p.suffix in (".json", ".dot", ".gv") and p.is_file()
    )
    for path in paths:
        fmt = args.format or detect_format(str(path))
        try:
            doc = parse_graph(path.read_bytes(), fmt)
            items.append((doc.name, str(path), doc))
        except errors.DGraphError as exc:
            items.append((path.stem, str(path), f"load failed: {exc}"))
    report = batch_analyze(items)
    payload = report.to_payload()
    if args.mappings:
        payload["mappings"] = _cluster_mappings(report, items)
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def _cluster_mappings(report, items) -> dict:
    graphs: dict[str, FlowGraph] = {}
    for name, _file, doc in items:
        if isinstance(doc, GraphDocument):
            graphs.setdefault(name, doc.graph)
    out: dict[str, dict[str, dict[str, str]]] = {}
    for cluster in report.clusters:
        if cluster.kind != "code" or len(cluster.names) < 2:
            continue
        rep = cluster.names[0]
        maps = {}
        for other in cluster.names[1:]:
            iso = is_isomorphic(graphs[rep], graphs[other])
            if iso is not None:
                maps[other] = dict(sorted(iso.mapping.items()))
        out[cluster.key] = maps
    return out
