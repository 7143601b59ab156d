"""Dijkstra-graph recognition: a single bottom-up contraction pass.

The recognizer walks the topological order of the graph minus its cycle
edges from the last vertex down to the first, contracting every prime it
finds rooted at the current vertex.  New primes created by a contraction
only ever appear at earlier positions of the order, so one descending pass
suffices.  The input is a Dijkstra graph exactly when the pass ends at the
trivial graph; the recorded steps form a replayable witness either way.

Inputs with m >= 2n-1 edges are rejected up front: every Dijkstra graph
satisfies m <= 2n-2 because each expansion step adds at most two edges per
new vertex.  Irreducible inputs need no special pre-check; the edge that
enters one of their cycles past its entry keeps every enclosing shape from
being closed, so the pass gets stuck and answers no.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cmp_to_key

from . import errors
from ._codetree import compare
from .flowgraph import FlowGraph, detect_cycle_edges
from .primes import PrimeMatch, Working, materialize_match


class Status(Enum):
    DIJKSTRA = "dijkstra"
    NOT_DIJKSTRA = "not-dijkstra"
    NOT_FLOW_GRAPH = "not-flow-graph"


class Reason(Enum):
    EDGE_BOUND_EXCEEDED = "edge-bound-exceeded"
    STUCK_RESIDUE = "stuck-residue"
    UNREACHABLE = "unreachable"
    MALFORMED_INPUT = "malformed-input"


class ContractionTrace:
    """The ordered contractile sequence found by the recognition pass.

    Steps materialize lazily: on million-vertex graphs the recognizer records
    them in a compact internal form and only builds PrimeMatch values when
    the steps are actually inspected (witness printing, replay).
    """

    __slots__ = ("_steps", "_raw", "_names")

    def __init__(
        self,
        steps: tuple[PrimeMatch, ...] = (),
        _raw: list[tuple] | None = None,
        _names: list[str] | None = None,
    ):
        if _raw is None:
            self._steps: tuple[PrimeMatch, ...] | None = tuple(steps)
            self._raw: list[tuple] | None = None
            self._names = None
        else:
            self._steps = None
            self._raw = _raw
            self._names = _names

    @property
    def steps(self) -> tuple[PrimeMatch, ...]:
        if self._steps is None:
            names = self._names
            self._steps = tuple(materialize_match(names, m) for m in self._raw)
            self._raw = None
            self._names = None
        return self._steps

    @property
    def k(self) -> int:
        return len(self._raw) if self._steps is None else len(self._steps)

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return self.k

    def __eq__(self, other) -> bool:
        if not isinstance(other, ContractionTrace):
            return NotImplemented
        return self.steps == other.steps

    def __repr__(self) -> str:
        return f"ContractionTrace(k={self.k})"


@dataclass(frozen=True)
class Verdict:
    status: Status
    trace: ContractionTrace
    reason: Reason | None = None
    residue: int = 0
    detail: str = ""

    @property
    def is_dijkstra(self) -> bool:
        return self.status is Status.DIJKSTRA

    @property
    def k(self) -> int:
        return self.trace.k


@dataclass
class PassStats:
    """Instrumentation for the recognition machinery.

    `edges_examined` counts work done by cycle-edge detection, topological
    sorting, prime matching and contraction; the up-front reachability and
    edge-count gates are not included.
    """

    edges_examined: int = 0


_EMPTY_TRACE = ContractionTrace(())


def _unreachable_verdict(missing: int) -> Verdict:
    return Verdict(
        Status.NOT_FLOW_GRAPH,
        _EMPTY_TRACE,
        Reason.UNREACHABLE,
        detail=f"{missing} vertices unreachable from source",
    )


def recognize(g: FlowGraph, stats: PassStats | None = None) -> Verdict:
    """Decide whether g is a Dijkstra graph, with a contraction witness."""
    verdict, _work, _cells = _run_reduction(g, want_codes=False, stats=stats)
    return verdict


def _run_reduction(
    g: FlowGraph,
    want_codes: bool,
    stats: PassStats | None = None,
) -> tuple[Verdict, Working | None, list | None]:
    """Shared engine behind recognize() and canonical_code().

    Returns the verdict, the final working graph (None when gated before the
    pass), and, when `want_codes` and the verdict is positive, the root code
    cell of the source vertex.  The whole pass runs on one integer-id
    working copy: a single DFS yields the cycle edges and, through its
    finishing order, the descending topological processing order.
    """
    n = g.n
    if n == 0:
        raise errors.SourceMissing("graph has no vertices")
    work = Working(g, None)
    if g.m >= 2 * n - 1:
        # unreachable vertices take precedence: such inputs are not flow
        # graphs at all; otherwise reject on the edge bound alone, without
        # running any of the recognition machinery
        reached = work.reachable_count()
        if reached < n:
            return _unreachable_verdict(n - reached), None, None
        return (
            Verdict(
                Status.NOT_DIJKSTRA,
                _EMPTY_TRACE,
                Reason.EDGE_BOUND_EXCEEDED,
                detail=f"m={g.m} >= 2n-1={2 * n - 1}",
            ),
            None,
            None,
        )

    # finishing order == descending topological order of the graph minus
    # its cycle edges, so every vertex is tried after all its descendants;
    # the DFS also settles reachability
    post = work.dfs_postorder()
    if len(post) < n:
        return _unreachable_verdict(n - len(post)), None, None
    succ = work.succ
    match = work.match
    contract = work.contract
    raw_steps: list[tuple] = []
    cells: list[list] | None = None
    if want_codes:
        cells = [[nm] for nm in work.names]

    for v in post:
        if not succ[v]:
            # sinks and absorbed vertices cannot root a prime
            continue
        m = match(v)
        if m is None:
            continue
        if cells is not None:
            _append_code(cells, m)
        raw_steps.append(m)
        contract(m)
        if work.n_alive == 1:
            break

    if stats is not None:
        stats.edges_examined += work.examined
    trace = ContractionTrace(_raw=raw_steps, _names=work.names)
    if work.n_alive == 1:
        root = cells[work.source] if cells is not None else None
        return Verdict(Status.DIJKSTRA, trace), work, root
    return (
        Verdict(
            Status.NOT_DIJKSTRA,
            trace,
            Reason.STUCK_RESIDUE,
            residue=work.n_alive,
            detail=f"{work.n_alive} vertices remain without a prime to contract",
        ),
        work,
        None,
    )


def _append_code(cells: list[list], m: tuple) -> None:
    """Extend the source vertex's code cell with the matched shape's code."""
    tag, v, ws, t = m
    cell = cells[v]
    if tag == "seq":
        cell.append(2)
        cell.append(cells[t])
    elif tag == "if":
        cell.append(3)
        cell.append(cells[ws[0]])
        cell.append(cells[t])
    elif tag == "while":
        cell.append(4)
        cell.append(cells[ws[0]])
        cell.append(cells[t])
    elif tag == "repeat":
        cell.append(5)
        cell.append(cells[ws[0]])
        cell.append(cells[t])
    elif len(ws) == 2:
        a, b = cells[ws[0]], cells[ws[1]]
        if _compare_branches(a, b) > 0:
            a, b = b, a
        cell.append(6)
        cell.append(a)
        cell.append(b)
        cell.append(cells[t])
    else:
        branches = sorted((cells[w] for w in ws), key=_BRANCH_KEY)
        cell.append(len(ws) + 4)
        cell.extend(branches)
        cell.append(cells[t])


def _compare_branches(a: list, b: list) -> int:
    c = compare(a, b)
    if c:
        return c
    # equal token streams: order by the owning vertex's name so the
    # provenance of automorphic branches stays deterministic
    return -1 if a[0] < b[0] else (1 if a[0] > b[0] else 0)


_BRANCH_KEY = cmp_to_key(_compare_branches)


def replay(g: FlowGraph, trace: ContractionTrace) -> FlowGraph:
    """Re-apply a contraction trace to g, validating every step.

    Returns the final graph; raises InvalidStep when a recorded match does
    not hold in the evolving graph.
    """
    work = Working(g, detect_cycle_edges(g))
    index = work.index
    for i, pm in enumerate(trace.steps):
        v = index.get(pm.source)
        if v is None or not work.alive[v]:
            raise errors.InvalidStep(i, f"source {pm.source!r} is not present")
        m = work.match(v)
        if m is None:
            raise errors.InvalidStep(i, f"no prime is rooted at {pm.source!r}")
        found = work.prime_match(m)
        if (found.kind, found.sink, found.members) != (pm.kind, pm.sink, pm.members):
            raise errors.InvalidStep(
                i, f"recorded {pm} but the graph matches {found}"
            )
        work.contract(m)
    return work.to_flowgraph()
