"""Graph documents on disk: a canonical JSON format and a DOT subset.

The JSON format is the canonical one: an object with "name", "source",
"vertices", "edges" and optional "metadata" (string pairs); serialization
uses sorted keys, sorted vertex and edge lists and a fixed indent, so
serialize(parse(x)) is byte-identical on canonical input.  The DOT subset
accepts a digraph block with node statements, single-hop `a -> b;` edges and
an optional `graph [k="v"];` attribute statement carried as metadata; the
source is the unique node attributed source=true.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from . import errors
from .canonical import analyze
from .flowgraph import FlowGraph, build_graph
from .recognizer import Status, Verdict


@dataclass(frozen=True)
class GraphDocument:
    name: str
    graph: FlowGraph
    metadata: dict[str, str] = field(default_factory=dict)


FORMATS = ("json", "dot")


def parse_graph(data: str | bytes, fmt: str) -> GraphDocument:
    """Parse bytes or text in the given format ("json" or "dot")."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt == "json":
        return _parse_json(text)
    if fmt == "dot":
        return _parse_dot(text)
    raise ValueError(f"unknown format {fmt!r}")


def serialize_graph(doc: GraphDocument, fmt: str) -> str:
    """Serialize a document canonically in the given format."""
    if fmt == "json":
        return _serialize_json(doc)
    if fmt == "dot":
        return _serialize_dot(doc)
    raise ValueError(f"unknown format {fmt!r}")


def detect_format(path: str) -> str:
    return "dot" if path.endswith((".dot", ".gv")) else "json"


# -- JSON ------------------------------------------------------------------

def _parse_json(text: str) -> GraphDocument:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise errors.ParseError(exc.lineno, exc.msg) from None
    if not isinstance(payload, dict):
        raise errors.ParseError(1, "top-level value must be an object")
    for key in ("name", "source", "vertices", "edges"):
        if key not in payload:
            raise errors.ParseError(1, f"missing required key {key!r}")
    name = payload["name"]
    source = payload["source"]
    vertices = payload["vertices"]
    edges = payload["edges"]
    if not isinstance(name, str):
        raise errors.ParseError(1, '"name" must be a string')
    if not isinstance(source, str):
        raise errors.ParseError(1, '"source" must be a string')
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise errors.ParseError(1, '"vertices" must be a list of strings')
    if not isinstance(edges, list):
        raise errors.ParseError(1, '"edges" must be a list of [from, to] pairs')
    pairs = []
    for e in edges:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
            raise errors.ParseError(1, f'"edges" entry {e!r} is not a [from, to] pair')
        pairs.append((e[0], e[1]))
    metadata = payload.get("metadata", {})
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise errors.ParseError(1, '"metadata" must map strings to strings')
    graph = build_graph(vertices, pairs, source)
    return GraphDocument(name, graph, dict(metadata))


def _serialize_json(doc: GraphDocument) -> str:
    payload = {
        "name": doc.name,
        "source": doc.graph.source,
        "vertices": sorted(doc.graph.vertices),
        "edges": [[a, b] for a, b in sorted(doc.graph.edges)],
        "metadata": doc.metadata,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# -- DOT subset ----------------------------------------------------------------

_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$|[0-9]+$")
_NODE_RE = re.compile(
    r"""^(?P<name>"(?:[^"\\]|\\.)*"|[A-Za-z0-9_]+)\s*(?:\[(?P<attrs>[^\]]*)\])?$"""
)
_EDGE_RE = re.compile(
    r"""^(?P<a>"(?:[^"\\]|\\.)*"|[A-Za-z0-9_]+)\s*->\s*(?P<b>"(?:[^"\\]|\\.)*"|[A-Za-z0-9_]+)$"""
)
_ATTR_RE = re.compile(
    r"""\s*(?P<k>[A-Za-z0-9_]+)\s*=\s*(?P<v>"(?:[^"\\]|\\.)*"|[A-Za-z0-9_]+)\s*(?:,|$)"""
)


def _unquote(tok: str) -> str:
    if tok.startswith('"'):
        return tok[1:-1].replace('\\"', '"').replace("\\\\", "\\")
    return tok


def _quote(name: str) -> str:
    if _BARE.match(name):
        return name
    return _quote_value(name)


def _quote_value(v: str) -> str:
    return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _parse_attrs(text: str, line: int) -> dict[str, str]:
    attrs: dict[str, str] = {}
    pos = 0
    while pos < len(text):
        m = _ATTR_RE.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise errors.ParseError(line, f"malformed attribute list {text!r}")
            break
        attrs[m.group("k")] = _unquote(m.group("v"))
        pos = m.end()
    return attrs


def _parse_dot(text: str) -> GraphDocument:
    # statements end at ';' or a line break; track line numbers for errors
    header = re.compile(r"\s*digraph(\s+(?P<name>\"(?:[^\"\\]|\\.)*\"|[A-Za-z0-9_]+))?\s*\{")
    m = header.match(text)
    if m is None:
        raise errors.ParseError(1, "expected 'digraph <name> {'")
    name = _unquote(m.group("name")) if m.group("name") else "g"
    body_start = m.end()
    line_of = lambda pos: text.count("\n", 0, pos) + 1
    end = text.rfind("}")
    if end < body_start:
        raise errors.ParseError(line_of(len(text) - 1), "missing closing '}'")
    body = text[body_start:end]
    if text[end + 1 :].strip():
        raise errors.ParseError(line_of(end + 1), "content after closing '}'")

    vertices: list[str] = []
    seen: set[str] = set()
    edges: list[tuple[str, str]] = []
    sources: list[str] = []
    metadata: dict[str, str] = {}

    offset = body_start
    for raw in re.split(r"[;\n]", body):
        stmt = raw.strip()
        line = line_of(offset)
        offset += len(raw) + 1
        if not stmt:
            continue
        em = _EDGE_RE.match(stmt)
        if em is not None:
            a = _unquote(em.group("a"))
            b = _unquote(em.group("b"))
            for x in (a, b):
                if x not in seen:
                    seen.add(x)
                    vertices.append(x)
            edges.append((a, b))
            continue
        nm = _NODE_RE.match(stmt)
        if nm is not None:
            node = _unquote(nm.group("name"))
            attrs = _parse_attrs(nm.group("attrs") or "", line)
            if node == "graph":
                metadata.update(attrs)
                continue
            if node not in seen:
                seen.add(node)
                vertices.append(node)
            if attrs.get("source") in ("true", "1"):
                sources.append(node)
            continue
        raise errors.ParseError(line, f"unrecognized statement {stmt!r}")

    if len(sources) != 1:
        raise errors.MissingSource(
            1,
            "no vertex is attributed source=true"
            if not sources
            else f"multiple vertices attributed source=true: {', '.join(sorted(sources))}",
        )
    graph = build_graph(vertices, edges, sources[0])
    return GraphDocument(name, graph, metadata)


def _serialize_dot(doc: GraphDocument) -> str:
    g = doc.graph
    lines = [f"digraph {_quote(doc.name)} {{"]
    if doc.metadata:
        attrs = ", ".join(
            f"{k}={_quote_value(v)}" for k, v in sorted(doc.metadata.items())
        )
        lines.append(f"  graph [{attrs}];")
    for v in sorted(g.vertices):
        if v == g.source:
            lines.append(f"  {_quote(v)} [source=true];")
        else:
            lines.append(f"  {_quote(v)};")
    for a, b in sorted(g.edges):
        lines.append(f"  {_quote(a)} -> {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- batch similarity ------------------------------------------------------------

@dataclass(frozen=True)
class ReportEntry:
    name: str
    file: str
    verdict: str
    code: str | None = None
    diagnostic: str | None = None


@dataclass(frozen=True)
class Cluster:
    key: str
    kind: str  # "code" | "diagnostic"
    names: tuple[str, ...]


@dataclass(frozen=True)
class SimilarityReport:
    """Per-graph verdicts plus clusters of token-identical codes.

    Two names share a code cluster iff their canonical codes are identical;
    unrecognized graphs appear as singleton clusters keyed by diagnostic.
    """

    entries: tuple[ReportEntry, ...]
    clusters: tuple[Cluster, ...]

    def to_payload(self) -> dict:
        return {
            "entries": [
                {
                    "name": e.name,
                    "file": e.file,
                    "verdict": e.verdict,
                    "code": e.code,
                    "diagnostic": e.diagnostic,
                }
                for e in self.entries
            ],
            "clusters": [
                {"key": c.key, "kind": c.kind, "names": list(c.names)}
                for c in self.clusters
            ],
        }


def verdict_label(verdict: Verdict) -> str:
    return {
        Status.DIJKSTRA: "DIJKSTRA",
        Status.NOT_DIJKSTRA: "NOT-DIJKSTRA",
        Status.NOT_FLOW_GRAPH: "NOT-FLOW-GRAPH",
    }[verdict.status]


def verdict_diagnostic(verdict: Verdict) -> str:
    reason = verdict.reason.value if verdict.reason else ""
    return f"{reason}: {verdict.detail}" if verdict.detail else reason


def batch_analyze(items: list[tuple[str, str, GraphDocument | str]]) -> SimilarityReport:
    """Analyze (name, file, document-or-error) items into a SimilarityReport.

    A string in place of a document records a load failure verbatim (entry
    verdict INVALID).  Entries are sorted by name, clusters by key; code
    clusters group all graphs sharing a code, diagnostics stay singletons.
    """
    entries: list[ReportEntry] = []
    by_code: dict[str, list[str]] = {}
    singletons: list[Cluster] = []
    for name, file, doc in items:
        if isinstance(doc, str):
            entries.append(ReportEntry(name, file, "INVALID", diagnostic=doc))
            singletons.append(Cluster(doc, "diagnostic", (name,)))
            continue
        verdict, code = analyze(doc.graph)
        if code is not None:
            entries.append(ReportEntry(name, file, "DIJKSTRA", code=code.line))
            by_code.setdefault(code.line, []).append(name)
        else:
            diag = verdict_diagnostic(verdict)
            entries.append(ReportEntry(name, file, verdict_label(verdict), diagnostic=diag))
            singletons.append(Cluster(diag, "diagnostic", (name,)))
    clusters = [
        Cluster(key, "code", tuple(sorted(names))) for key, names in by_code.items()
    ]
    clusters.extend(singletons)
    clusters.sort(key=lambda c: (c.kind, c.key, c.names))
    entries.sort(key=lambda e: (e.name, e.file))
    return SimilarityReport(tuple(entries), tuple(clusters))
