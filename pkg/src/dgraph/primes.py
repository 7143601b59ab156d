"""Statement graphs, prime-subgraph detection and graph rewriting.

A statement graph is one of the seven primitive shapes of structured control
flow (trivial, sequence, if-then, if-then-else, p-case, while, repeat).  A
prime subgraph is an induced, closed occurrence of a non-trivial statement
graph; closedness means external in-edges attach only at its source, external
out-edges only at its sink, and incoming cycle edges at the source come only
from the source's own out-neighbors.  Contraction coalesces a prime into its
source vertex; expansion is the inverse rewrite.

Shape matching is cycle-edge aware: the while and repeat shapes require their
loop-back edge to be a cycle edge whose head is the shape's source, and every
other shape edge must *not* be a cycle edge.  Without the latter condition a
back edge could masquerade as e.g. a sequence, and contracting it would break
the confluence of contraction orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import errors
from .flowgraph import CycleEdgeSet, FlowGraph, build_graph


@dataclass(frozen=True)
class StatementKind:
    """One of the primitive statement-graph shapes.

    `p` is the branch count and is meaningful for the p-case shape only
    (p >= 3); the two-way selection is the distinct if-then-else shape.
    """

    name: str
    p: int = 0

    @property
    def type_code(self) -> int:
        code = _TYPE_CODES.get(self.name)
        if code is not None:
            return code
        if self.name == "p-case":
            return self.p + 4
        raise ValueError(f"unknown statement kind {self.name!r}")

    @property
    def arity(self) -> int:
        """Number of fresh vertices an expansion of this kind introduces."""
        return _ARITY[self.name] if self.name != "p-case" else self.p + 1

    @property
    def vertex_delta(self) -> int:
        return self.arity

    @property
    def edge_delta(self) -> int:
        """Number of edges an expansion of this kind adds."""
        return _EDGE_DELTA[self.name] if self.name != "p-case" else 2 * self.p

    def __str__(self) -> str:
        return f"{self.p}-case" if self.name == "p-case" else self.name


_TYPE_CODES = {
    "trivial": 1,
    "sequence": 2,
    "if-then": 3,
    "while": 4,
    "repeat": 5,
    "if-then-else": 6,
}
_ARITY = {"trivial": 0, "sequence": 1, "if-then": 2, "while": 2, "repeat": 2, "if-then-else": 3}
_EDGE_DELTA = {"trivial": 0, "sequence": 1, "if-then": 3, "while": 3, "repeat": 3, "if-then-else": 4}

TRIVIAL = StatementKind("trivial")
SEQUENCE = StatementKind("sequence")
IF_THEN = StatementKind("if-then")
WHILE = StatementKind("while")
REPEAT = StatementKind("repeat")
IF_THEN_ELSE = StatementKind("if-then-else")

NON_TRIVIAL_KINDS = (SEQUENCE, IF_THEN, IF_THEN_ELSE, WHILE, REPEAT)
KIND_NAMES = ("sequence", "if-then", "if-then-else", "p-case", "while", "repeat")


def p_case(p: int) -> StatementKind:
    if p < 3:
        raise ValueError("p-case requires p >= 3")
    return StatementKind("p-case", p)


def kind_from_name(name: str, p: int = 0) -> StatementKind:
    if name == "p-case":
        return p_case(p)
    if name in _TYPE_CODES:
        return StatementKind(name)
    raise ValueError(f"unknown statement kind {name!r}")


@dataclass(frozen=True)
class PrimeMatch:
    """A detected prime subgraph rooted at `source`.

    `members` is the sorted vertex set of the occurrence, `sink` its unique
    exit vertex, and `branch_order` the out-neighbors of the source inside
    the occurrence in detection order (ascending name).
    """

    kind: StatementKind
    source: str
    sink: str
    members: tuple[str, ...]
    branch_order: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.kind} at {self.source} [members: {', '.join(self.members)}; sink: {self.sink}]"


# Internal match tags; `ws` are the branch vertices and `t` the sink.
_SEQ, _IF, _WHILE, _REPEAT, _CASE = "seq", "if", "while", "repeat", "case"

_TAG_INTERNAL_EDGES = {
    _SEQ: 1,
    _IF: 3,
    _WHILE: 3,
    _REPEAT: 3,
}


class Working:
    """Mutable adjacency state used by the matching and contraction passes.

    Vertices are mapped to integer ids equal to the rank of their name in
    sorted order, so ascending id comparisons coincide with ascending name
    comparisons.  Adjacency is kept as lists; all shapes are degree-bounded
    so the list scans stay proportional to the local edge count.  `examined`
    accumulates a rough count of edge examinations for complexity checks.
    """

    __slots__ = (
        "names", "index", "succ", "pred", "cyc_in",
        "alive", "n_alive", "m", "source", "examined",
    )

    def __init__(self, g: FlowGraph, ec: CycleEdgeSet | None):
        names = sorted(g.vertices)
        index = dict(zip(names, range(len(names))))
        n = len(names)
        # adjacency entries start as a shared empty marker (never mutated)
        # and get a private list on first use, so sinks and sources stay cheap
        succ: list[list[int]] = [_DEAD] * n
        pred: list[list[int]] = [_DEAD] * n
        for a, b in g.edges:
            ia = index[a]
            ib = index[b]
            lst = succ[ia]
            if lst:
                lst.append(ib)
            else:
                succ[ia] = [ib]
            lst = pred[ib]
            if lst:
                lst.append(ia)
            else:
                pred[ib] = [ia]
        for lst in succ:
            if len(lst) > 1:
                lst.sort()
        cyc_in: list = [_DEAD] * n
        if ec is not None:
            for a, b in ec:
                ib = index[b]
                if cyc_in[ib]:
                    cyc_in[ib].append(index[a])
                else:
                    cyc_in[ib] = [index[a]]
        self.names = names
        self.index = index
        self.succ = succ
        self.pred = pred
        self.cyc_in = cyc_in
        self.alive = bytearray([1]) * n
        self.n_alive = n
        self.m = g.m
        self.source = index[g.source]
        self.examined = 0

    def reachable_count(self) -> int:
        """Number of vertices reachable from the source."""
        succ = self.succ
        seen = bytearray(len(succ))
        seen[self.source] = 1
        count = 1
        stack = [self.source]
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if not seen[w]:
                    seen[w] = 1
                    count += 1
                    stack.append(w)
        return count

    def dfs_postorder(self) -> list[int]:
        """One DFS from the source with children in ascending id order.

        Fills cyc_in with the cycle edges found (an edge v->w is a cycle edge
        when w is on the stack as v->w is examined) and returns the vertices
        in finishing order.  The reversed finishing order is a topological
        order of the graph minus its cycle edges, so iterating the result
        forward processes every vertex after all of its non-cycle
        descendants.  Assumes all vertices are reachable.
        """
        succ = self.succ
        cyc_in = self.cyc_in
        n = len(succ)
        color = bytearray(n)  # 0 unvisited, 1 on stack, 2 finished
        ptr = [0] * n
        post: list[int] = []
        s = self.source
        color[s] = 1
        stack = [s]
        while stack:
            v = stack[-1]
            adj = succ[v]
            i = ptr[v]
            if i < len(adj):
                ptr[v] = i + 1
                w = adj[i]
                c = color[w]
                if c == 0:
                    color[w] = 1
                    stack.append(w)
                elif c == 1:
                    ci = cyc_in[w]
                    if ci:
                        ci.append(v)
                    else:
                        cyc_in[w] = [v]
            else:
                color[v] = 2
                post.append(v)
                stack.pop()
        self.examined += self.m
        return post

    # -- queries ---------------------------------------------------------

    @property
    def is_trivial(self) -> bool:
        return self.n_alive == 1

    def match(self, v: int) -> Optional[tuple]:
        """Return the unique prime rooted at v, as (tag, v, ws, t), or None."""
        succ = self.succ
        pred = self.pred
        cyc_in = self.cyc_in
        outs = succ[v]
        d = len(outs)
        self.examined += d + 1
        if d == 0:
            return None
        if d == 1:
            w = outs[0]
            pw = pred[w]
            if len(pw) != 1 or pw[0] != v:
                return None
            wouts = succ[w]
            self.examined += len(wouts)
            if v in wouts:
                # repeat: body w loops back to v and exits to t
                if len(wouts) != 2:
                    return None
                t = wouts[1] if wouts[0] == v else wouts[0]
                civ = cyc_in[v]
                if len(civ) != 1 or civ[0] != w:
                    return None
                if cyc_in[w] or cyc_in[t]:
                    return None
                pt = pred[t]
                if len(pt) != 1 or pt[0] != w:
                    return None
                if v in succ[t]:
                    return None
                return (_REPEAT, v, (w,), t)
            # sequence
            if cyc_in[v] or cyc_in[w]:
                return None
            return (_SEQ, v, (w,), w)
        civ = cyc_in[v]
        if d == 2:
            a, b = outs
            # while: the body's single out-edge returns to v as a cycle edge
            for w, t in ((a, b), (b, a)):
                sw = succ[w]
                if len(sw) == 1 and sw[0] == v:
                    pw = pred[w]
                    if len(pw) != 1 or pw[0] != v:
                        continue
                    if len(civ) != 1 or civ[0] != w:
                        continue
                    if cyc_in[w] or cyc_in[t]:
                        continue
                    pt = pred[t]
                    if len(pt) != 1 or pt[0] != v:
                        continue
                    if v in succ[t]:
                        continue
                    self.examined += 4
                    return (_WHILE, v, (w,), t)
            if civ:
                return None
            # if-then: one branch vertex falls through to the join
            for w, t in ((a, b), (b, a)):
                sw = succ[w]
                pw = pred[w]
                if len(sw) == 1 and sw[0] == t and len(pw) == 1 and pw[0] == v:
                    pt = pred[t]
                    if len(pt) == 2 and v in pt and w in pt:
                        if cyc_in[w] or cyc_in[t]:
                            continue
                        if v in succ[t]:
                            continue
                        self.examined += 4
                        return (_IF, v, (w,), t)
        if civ:
            return None
        # convergent fan: if-then-else (d == 2) or p-case (d >= 3)
        w0 = outs[0]
        s0 = succ[w0]
        if len(s0) != 1:
            return None
        t = s0[0]
        if t == v:
            return None
        for w in outs:
            sw = succ[w]
            pw = pred[w]
            self.examined += 2
            if len(sw) != 1 or sw[0] != t or len(pw) != 1 or pw[0] != v:
                return None
            if cyc_in[w]:
                return None
        pt = pred[t]
        self.examined += len(pt)
        if len(pt) != d or set(pt) != set(outs):
            return None
        if cyc_in[t] or v in succ[t]:
            return None
        # succ lists stay ascending: they are sorted at construction and
        # contraction only ever replaces them wholesale
        return (_CASE, v, tuple(outs), t)

    # -- rewriting ------------------------------------------------------------

    def contract(self, m: tuple) -> None:
        """Coalesce a matched prime into its source vertex."""
        tag, v, ws, t = m
        succ = self.succ
        pred = self.pred
        cyc_in = self.cyc_in
        if tag == _SEQ:
            others = (t,)
        elif tag == _CASE:
            others = ws + (t,)
        else:
            others = (ws[0], t)
        if tag == _WHILE or tag == _REPEAT:
            # internal loop-back edge disappears with the body
            cyc_in[v].clear()
            pv = pred[v]
            pv.remove(ws[0])
        moved = succ[t]
        for x in moved:
            px = pred[x]
            px[px.index(t)] = v
            cx = cyc_in[x]
            if cx:
                for i, u in enumerate(cx):
                    if u == t:
                        cx[i] = v
                        break
        succ[v] = moved
        for dd in others:
            succ[dd] = _DEAD
            pred[dd] = _DEAD
            cyc_in[dd] = _DEAD
            self.alive[dd] = 0
        n_int = _TAG_INTERNAL_EDGES.get(tag, 2 * len(ws))
        self.examined += n_int + len(moved)
        self.n_alive -= len(others)
        self.m -= n_int
        if self.alive[self.source] == 0:
            self.source = v

    # -- conversions --------------------------------------------------------

    def prime_match(self, m: tuple) -> PrimeMatch:
        return materialize_match(self.names, m)

    def to_flowgraph(self) -> FlowGraph:
        names = self.names
        alive = self.alive
        vs = [names[i] for i in range(len(names)) if alive[i]]
        es = []
        for i, outs in enumerate(self.succ):
            if alive[i]:
                nm = names[i]
                es.extend((nm, names[w]) for w in outs)
        return build_graph(vs, es, names[self.source])

    def cycle_edge_set(self) -> CycleEdgeSet:
        names = self.names
        pairs = []
        for head, tails in enumerate(self.cyc_in):
            if self.alive[head]:
                pairs.extend((names[u], names[head]) for u in tails)
        return CycleEdgeSet(frozenset(pairs))


_DEAD: list[int] = []  # shared empty marker; never mutated


def materialize_match(names: list[str], m: tuple) -> PrimeMatch:
    """Convert an internal integer match tuple into a PrimeMatch."""
    tag, v, ws, t = m
    if tag == _SEQ:
        kind = SEQUENCE
        branches = (names[ws[0]],)
        members = (v, t)
    elif tag == _IF:
        kind = IF_THEN
        branches = (names[ws[0]], names[t])
        members = (v, ws[0], t)
    elif tag == _WHILE:
        kind = WHILE
        branches = (names[ws[0]], names[t])
        members = (v, ws[0], t)
    elif tag == _REPEAT:
        kind = REPEAT
        branches = (names[ws[0]],)
        members = (v, ws[0], t)
    else:
        p = len(ws)
        kind = IF_THEN_ELSE if p == 2 else p_case(p)
        branches = tuple(names[w] for w in ws)
        members = (v,) + ws + (t,)
    return PrimeMatch(
        kind=kind,
        source=names[v],
        sink=names[t],
        members=tuple(sorted(names[u] for u in set(members))),
        branch_order=branches,
    )


def find_primes(g: FlowGraph, ec: CycleEdgeSet) -> tuple[PrimeMatch, ...]:
    """All prime subgraphs of g, ordered by source name."""
    work = Working(g, ec)
    out = []
    for v in range(len(work.names)):
        m = work.match(v)
        if m is not None:
            out.append(work.prime_match(m))
    return tuple(out)


def match_prime_at(g: FlowGraph, ec: CycleEdgeSet, v: str) -> Optional[PrimeMatch]:
    """Return the unique prime subgraph with source v, if one exists.

    All neighborhoods are taken in g, and `ec` must be the cycle-edge set
    being maintained for g.  Absence of a match is a value, not an error.
    """
    if v not in g.vertices:
        raise errors.UnknownEndpoint(f"vertex {v!r} not in graph")
    work = Working(g, ec)
    m = work.match(work.index[v])
    return None if m is None else work.prime_match(m)


def contract(g: FlowGraph, ec: CycleEdgeSet, pm: PrimeMatch) -> tuple[FlowGraph, CycleEdgeSet]:
    """Contract a prime match, returning the new graph and cycle-edge set.

    The coalesced vertex keeps the source's name.  Edges surviving the
    contraction keep their cycle-edge status, with endpoints mapped through
    the coalescing; internal edges (including the while/repeat loop-back)
    disappear.  Raises InvalidMatch if `pm` cannot be re-validated against g.
    """
    work = Working(g, ec)
    _validate_match(work, g, ec, pm)
    work.contract(work.match(work.index[pm.source]))
    return work.to_flowgraph(), work.cycle_edge_set()


def _validate_match(work: Working, g: FlowGraph, ec: CycleEdgeSet, pm: PrimeMatch) -> None:
    if pm.source not in g.vertices:
        raise errors.InvalidMatch(f"source {pm.source!r} not in graph")
    m = work.match(work.index[pm.source])
    if m is None:
        raise errors.InvalidMatch(f"no prime is rooted at {pm.source!r}")
    found = work.prime_match(m)
    if (found.kind, found.sink, found.members) != (pm.kind, pm.sink, pm.members):
        raise errors.InvalidMatch(
            f"match at {pm.source!r} disagrees with the graph: expected {pm}, found {found}"
        )


def expand(g: FlowGraph, v: str, kind: StatementKind, fresh_names: tuple[str, ...] | list[str]) -> FlowGraph:
    """Replace vertex v by a statement graph of the given kind.

    v becomes the source of the new shape and keeps its name; external
    out-edges of v are re-attached to the shape's sink.  `fresh_names` must
    supply exactly `kind.arity` new vertex names (branch vertices first,
    sink last).
    """
    if v not in g.vertices:
        raise errors.UnknownEndpoint(f"vertex {v!r} not in graph")
    fresh = tuple(fresh_names)
    if len(fresh) != kind.arity:
        raise errors.ArityMismatch(
            f"{kind} expansion needs {kind.arity} fresh vertices, got {len(fresh)}"
        )
    for nm in fresh:
        if nm in g.vertices:
            raise errors.NameCollision(f"fresh vertex {nm!r} already in graph")
    if len(set(fresh)) != len(fresh):
        raise errors.NameCollision("fresh vertex names must be distinct")
    if kind.name == "trivial":
        return g

    old_out = [w for (a, w) in g.edges if a == v]
    edges = set(g.edges)
    for w in old_out:
        edges.remove((v, w))
    name = kind.name
    if name == "sequence":
        (w,) = fresh
        sink = w
        edges.add((v, w))
    elif name == "if-then":
        w, t = fresh
        sink = t
        edges.update([(v, w), (v, t), (w, t)])
    elif name == "while":
        w, t = fresh
        sink = t
        edges.update([(v, w), (w, v), (v, t)])
    elif name == "repeat":
        w, t = fresh
        sink = t
        edges.update([(v, w), (w, v), (w, t)])
    else:  # if-then-else / p-case
        branches = fresh[:-1]
        sink = fresh[-1]
        for w in branches:
            edges.add((v, w))
            edges.add((w, sink))
    for w in old_out:
        edges.add((sink, w))
    return build_graph(set(g.vertices) | set(fresh), edges, g.source)
