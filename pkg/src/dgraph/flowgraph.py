"""Flow graphs and their traversal primitives.

A flow graph is a simple directed graph with a distinguished source vertex.
This module provides validated construction, reachability checking, cycle-edge
extraction via a deterministic depth-first search, and topological sorting of
the acyclic remainder.  Everything downstream (prime detection, recognition,
canonical codes) operates on these values.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

from . import errors


@dataclass(frozen=True)
class FlowGraph:
    """Immutable simple digraph with a distinguished source vertex.

    Vertices are non-empty name strings.  Instances are safe to share across
    threads; all traversal functions in this package are pure.
    """

    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]
    source: str

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_trivial(self) -> bool:
        return len(self.vertices) == 1

    def has_edge(self, v: str, w: str) -> bool:
        return (v, w) in self.edges

    @cached_property
    def succ(self) -> dict[str, tuple[str, ...]]:
        """Out-neighbors per vertex, each tuple sorted by name."""
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            out[a].append(b)
        return {v: tuple(sorted(ws)) for v, ws in out.items()}

    @cached_property
    def pred(self) -> dict[str, tuple[str, ...]]:
        """In-neighbors per vertex, each tuple sorted by name."""
        inn: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            inn[b].append(a)
        return {v: tuple(sorted(us)) for v, us in inn.items()}


@dataclass(frozen=True)
class CycleEdgeSet:
    """The cycle edges (back edges) of one DFS of a graph from its source."""

    edges: frozenset[tuple[str, str]]

    def __contains__(self, edge: tuple[str, str]) -> bool:
        return edge in self.edges

    def __iter__(self):
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __bool__(self) -> bool:
        return bool(self.edges)


@dataclass(frozen=True)
class TopoOrder:
    """A topological order of the graph minus its cycle edges."""

    order: tuple[str, ...]

    @cached_property
    def rank(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.order)}


def build_graph(
    vertices: Iterable[str],
    edges: Iterable[tuple[str, str]],
    source: str,
) -> FlowGraph:
    """Validate and build a FlowGraph.

    Raises DuplicateVertex, UnknownEndpoint, SelfLoop, ParallelEdge,
    SourceMissing or InvalidName on malformed input.  Reachability of all
    vertices from the source is *not* required here; use
    check_flow_reachability for that.
    """
    vseen: set[str] = set()
    for v in vertices:
        if not isinstance(v, str) or not v:
            raise errors.InvalidName(f"vertex name must be a non-empty string, got {v!r}")
        if v in vseen:
            raise errors.DuplicateVertex(f"vertex {v!r} listed twice")
        vseen.add(v)
    eseen: set[tuple[str, str]] = set()
    for e in edges:
        a, b = e
        if a not in vseen:
            raise errors.UnknownEndpoint(f"edge {a!r} -> {b!r}: unknown vertex {a!r}")
        if b not in vseen:
            raise errors.UnknownEndpoint(f"edge {a!r} -> {b!r}: unknown vertex {b!r}")
        if a == b:
            raise errors.SelfLoop(f"self-loop on {a!r}")
        if (a, b) in eseen:
            raise errors.ParallelEdge(f"edge {a!r} -> {b!r} listed twice")
        eseen.add((a, b))
    if source not in vseen:
        raise errors.SourceMissing(f"source {source!r} is not a vertex")
    return FlowGraph(frozenset(vseen), frozenset(eseen), source)


def check_flow_reachability(g: FlowGraph) -> bool:
    """True iff every vertex is reachable from the source."""
    return len(reachable_from_source(g)) == g.n


def reachable_from_source(g: FlowGraph) -> set[str]:
    succ = g.succ
    seen = {g.source}
    frontier = [g.source]
    while frontier:
        v = frontier.pop()
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen


def detect_cycle_edges(
    g: FlowGraph,
    child_order: Mapping[str, Sequence[str]] | None = None,
) -> CycleEdgeSet:
    """Cycle edges of one deterministic DFS of g starting at the source.

    An edge v->w is a cycle edge when w is still on the DFS stack at the
    moment v->w is examined.  By default children are visited in ascending
    name order; `child_order` may supply a different per-vertex visiting
    order (it must list exactly the out-neighbors of each vertex it covers).
    On a reducible graph the resulting set does not depend on the order; on
    an irreducible graph it may.
    """
    succ = g.succ
    if child_order is not None:
        adj: dict[str, Sequence[str]] = {}
        for v in g.vertices:
            ws = child_order.get(v)
            if ws is None:
                adj[v] = succ[v]
            else:
                if sorted(ws) != list(succ[v]):
                    raise ValueError(f"child_order for {v!r} is not a permutation of its out-neighbors")
                adj[v] = tuple(ws)
    else:
        adj = succ

    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(g.vertices, WHITE)
    cyc: set[tuple[str, str]] = set()
    color[g.source] = GREY
    stack: list[tuple[str, int]] = [(g.source, 0)]
    while stack:
        v, i = stack[-1]
        children = adj[v]
        if i < len(children):
            stack[-1] = (v, i + 1)
            w = children[i]
            c = color[w]
            if c == WHITE:
                color[w] = GREY
                stack.append((w, 0))
            elif c == GREY:
                cyc.add((v, w))
        else:
            color[v] = BLACK
            stack.pop()
    return CycleEdgeSet(frozenset(cyc))


def topo_sort(g: FlowGraph, ec: CycleEdgeSet) -> TopoOrder:
    """Deterministic topological order of g minus its cycle edges.

    Ties are broken by ascending vertex name.  Raises CycleRemains when
    removing `ec` does not leave the graph acyclic.
    """
    cyc = ec.edges
    indeg = dict.fromkeys(g.vertices, 0)
    for a, b in g.edges:
        if (a, b) not in cyc:
            indeg[b] += 1
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order: list[str] = []
    succ = g.succ
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            if (v, w) in cyc:
                continue
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != g.n:
        raise errors.CycleRemains(
            f"{g.n - len(order)} vertices remain on cycles after removing the given cycle edges"
        )
    return TopoOrder(tuple(order))
