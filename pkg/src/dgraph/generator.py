"""Construction-side tooling: random Dijkstra graphs, perturbations, oracles.

Dijkstra graphs are generated exactly the way the class is defined: start
from the trivial graph with its vertex marked expansible (X), repeatedly
expand a random X-vertex into a random non-trivial statement graph (the new
source becomes regular, R), and stop once the target size is reached.  The
module also provides structural perturbations for negative test corpora, a
brute-force contraction oracle that explores every contraction order, and a
backtracking isomorphism search.  The oracle deliberately shares no code
with the recognizer or the canonical encoder: it recomputes cycle edges per
state, enumerates prime candidates straight from the closedness definition,
and contracts by plain vertex identification.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum

from . import errors
from .flowgraph import FlowGraph, build_graph, detect_cycle_edges
from .primes import KIND_NAMES, StatementKind, expand, kind_from_name, p_case


@dataclass(frozen=True)
class ExpansionScript:
    """A reproducible construction recipe for a generated Dijkstra graph.

    `steps` lists (expanded vertex, statement kind) in order; `labels` is the
    final X/R label of every vertex (X = still expansible).  Replaying the
    steps from the trivial graph with the same fresh-name counter reproduces
    the graph exactly.
    """

    seed: int
    steps: tuple[tuple[str, StatementKind], ...]
    labels: dict[str, str]

    def to_json(self) -> str:
        payload = {
            "seed": self.seed,
            "steps": [
                {"vertex": v, "kind": k.name, "p": k.p} for v, k in self.steps
            ],
            "labels": dict(sorted(self.labels.items())),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "ExpansionScript":
        payload = json.loads(text)
        steps = tuple(
            (s["vertex"], kind_from_name(s["kind"], s.get("p", 0)))
            for s in payload["steps"]
        )
        return ExpansionScript(payload["seed"], steps, dict(payload["labels"]))


def _fresh_names(counter: int, arity: int) -> tuple[list[str], int]:
    return [f"v{counter + j}" for j in range(arity)], counter + arity


def generate_dg(
    seed: int,
    target_n: int,
    kinds: tuple[str, ...] | list[str] | None = None,
    weights: list[float] | None = None,
    p_choices: tuple[int, ...] = (3, 4, 5),
) -> tuple[FlowGraph, ExpansionScript]:
    """Generate a random Dijkstra graph with at least target_n vertices.

    `kinds` restricts the statement kinds drawn (names from KIND_NAMES,
    default all six, uniformly; `weights` biases the draw).  Expansion stops
    as soon as the vertex count reaches target_n, so the result overshoots
    by at most max(p_choices) - 2 vertices.  Deterministic in its arguments.
    """
    if target_n < 1:
        raise ValueError("target_n must be >= 1")
    kind_names = list(kinds) if kinds else list(KIND_NAMES)
    for nm in kind_names:
        if nm not in KIND_NAMES:
            raise ValueError(f"unknown statement kind {nm!r}")
    rng = random.Random(seed)
    succ: dict[str, list[str]] = {"v0": []}
    labels = {"v0": "X"}
    xlist = ["v0"]
    steps: list[tuple[str, StatementKind]] = []
    counter = 1
    count = 1
    while count < target_n and xlist:
        i = rng.randrange(len(xlist))
        v = xlist[i]
        xlist[i] = xlist[-1]
        xlist.pop()
        if weights is None:
            name = rng.choice(kind_names)
        else:
            name = rng.choices(kind_names, weights)[0]
        if name == "p-case":
            kind = p_case(rng.choice(p_choices))
        else:
            kind = kind_from_name(name)
        fresh, counter = _fresh_names(counter, kind.arity)
        old_out = succ[v]
        if name == "sequence":
            (w,) = fresh
            sink = w
            succ[v] = [w]
        elif name == "if-then":
            w, t = fresh
            sink = t
            succ[v] = [w, t]
            succ[w] = [t]
        elif name == "while":
            w, t = fresh
            sink = t
            succ[v] = [w, t]
            succ[w] = [v]
        elif name == "repeat":
            w, t = fresh
            sink = t
            succ[v] = [w]
            succ[w] = [v, t]
        else:
            branches = fresh[:-1]
            sink = fresh[-1]
            succ[v] = list(branches)
            for w in branches:
                succ[w] = [sink]
        succ[sink] = old_out
        labels[v] = "R"
        for nm in fresh:
            labels[nm] = "X"
        xlist.extend(fresh)
        steps.append((v, kind))
        count += kind.arity
    edges = [(a, b) for a, outs in succ.items() for b in outs]
    g = build_graph(succ.keys(), edges, "v0")
    return g, ExpansionScript(seed, tuple(steps), labels)


def replay_script(script: ExpansionScript) -> FlowGraph:
    """Rebuild the graph of a script through the public expand operation."""
    g = build_graph({"v0"}, [], "v0")
    counter = 1
    for v, kind in script.steps:
        fresh, counter = _fresh_names(counter, kind.arity)
        g = expand(g, v, kind, fresh)
    return g


def random_relabel(g: FlowGraph, seed: int) -> tuple[FlowGraph, dict[str, str]]:
    """Rename all vertices with a random bijection; returns (graph, mapping)."""
    rng = random.Random(seed)
    olds = sorted(g.vertices)
    slots = list(range(len(olds)))
    rng.shuffle(slots)
    width = len(str(len(olds)))
    mapping = {old: f"u{slots[i]:0{width}d}" for i, old in enumerate(olds)}
    edges = [(mapping[a], mapping[b]) for a, b in g.edges]
    return build_graph(mapping.values(), edges, mapping[g.source]), mapping


def random_flow_graph(seed: int, n: int, extra_edges: int | None = None) -> FlowGraph:
    """A random simple flow graph: spanning edges from earlier vertices plus
    random extras.  Every vertex is reachable from the source by construction."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(n)]
    edges: set[tuple[str, str]] = set()
    for i in range(1, n):
        edges.add((names[rng.randrange(i)], names[i]))
    extra = rng.randrange(n + 1) if extra_edges is None else extra_edges
    for _ in range(extra * 3):
        if extra <= 0:
            break
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b and (names[a], names[b]) not in edges:
            edges.add((names[a], names[b]))
            extra -= 1
    return build_graph(names, edges, names[0])


class PerturbMode(Enum):
    ADD_EDGE = "add-edge"
    DELETE_EDGE = "delete-edge"
    REDIRECT_EDGE = "redirect-edge"
    ADD_CROSS_ENTRY = "add-cross-entry"


def perturb(g: FlowGraph, seed: int, mode: PerturbMode) -> FlowGraph:
    """Apply one random structural perturbation, preserving simplicity.

    The result may or may not remain a Dijkstra graph (or even a flow
    graph); callers filter by verdict.  ADD_CROSS_ENTRY aims an edge into a
    cycle body past its entry vertex, the classic way to destroy
    reducibility.  Raises NoApplicablePerturbation when the mode cannot
    apply to g.
    """
    if g.is_trivial:
        raise errors.NoApplicablePerturbation("graph is trivial")
    rng = random.Random(seed)
    vs = sorted(g.vertices)
    es = sorted(g.edges)
    if mode is PerturbMode.ADD_EDGE:
        candidates = [
            (a, b) for a in vs for b in vs if a != b and (a, b) not in g.edges
        ]
        if not candidates:
            raise errors.NoApplicablePerturbation("graph is complete")
        a, b = rng.choice(candidates)
        return build_graph(vs, set(g.edges) | {(a, b)}, g.source)
    if mode is PerturbMode.DELETE_EDGE:
        if not es:
            raise errors.NoApplicablePerturbation("graph has no edges")
        e = rng.choice(es)
        return build_graph(vs, set(g.edges) - {e}, g.source)
    if mode is PerturbMode.REDIRECT_EDGE:
        rng.shuffle(es)
        for a, b in es:
            candidates = [
                x for x in vs if x != a and x != b and (a, x) not in g.edges
            ]
            if candidates:
                x = rng.choice(candidates)
                return build_graph(vs, (set(g.edges) - {(a, b)}) | {(a, x)}, g.source)
        raise errors.NoApplicablePerturbation("no edge can be redirected")
    if mode is PerturbMode.ADD_CROSS_ENTRY:
        return _add_cross_entry(g, rng, vs)
    raise ValueError(f"unknown perturbation mode {mode!r}")


def _add_cross_entry(g: FlowGraph, rng: random.Random, vs: list[str]) -> FlowGraph:
    cyc = sorted(detect_cycle_edges(g))
    if not cyc:
        raise errors.NoApplicablePerturbation("graph is acyclic")
    rng.shuffle(cyc)
    for tail, head in cyc:
        body = _natural_loop(g, tail, head)
        outside = [u for u in vs if u not in body]
        strong = set(_reachable_avoiding(g, head))
        targets = sorted(body - {head})
        candidates = [
            (u, b)
            for b in targets
            for u in outside
            if (u, b) not in g.edges
        ]
        if not candidates:
            continue
        preferred = [(u, b) for u, b in candidates if u in strong]
        u, b = rng.choice(preferred or candidates)
        return build_graph(vs, set(g.edges) | {(u, b)}, g.source)
    raise errors.NoApplicablePerturbation("no cycle admits a cross entry")


def _natural_loop(g: FlowGraph, tail: str, head: str) -> set[str]:
    """Vertices of the loop of back edge tail->head: head plus everything
    that reaches tail without passing through head."""
    body = {head, tail}
    stack = [tail]
    pred = g.pred
    while stack:
        x = stack.pop()
        for u in pred[x]:
            if u not in body:
                body.add(u)
                stack.append(u)
    return body


def _reachable_avoiding(g: FlowGraph, blocked: str) -> set[str]:
    if g.source == blocked:
        return set()
    seen = {g.source}
    stack = [g.source]
    succ = g.succ
    while stack:
        x = stack.pop()
        for w in succ[x]:
            if w != blocked and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


# -- brute-force contraction oracle ------------------------------------------

# Shape templates: name -> (member roles, edges, cycle edges).  Roles are
# (source, branches..., sink); edges refer to role indices.
def _oracle_cycle_edges(
    vertices: frozenset[str],
    succ: dict[str, list[str]],
    source: str,
) -> set[tuple[str, str]]:
    colors = dict.fromkeys(vertices, 0)
    colors[source] = 1
    out: set[tuple[str, str]] = set()
    stack: list[tuple[str, int]] = [(source, 0)]
    while stack:
        v, i = stack[-1]
        adj = succ[v]
        if i < len(adj):
            stack[-1] = (v, i + 1)
            w = adj[i]
            c = colors[w]
            if c == 0:
                colors[w] = 1
                stack.append((w, 0))
            elif c == 1:
                out.add((v, w))
        else:
            colors[v] = 2
            stack.pop()
    return out


def _naive_primes(
    vertices: frozenset[str],
    edges: frozenset[tuple[str, str]],
    source: str,
) -> list[tuple[str, frozenset[str]]]:
    """All prime subgraphs of the state, found from first principles.

    Returns (source, members) pairs.  A candidate passes when its induced
    edges equal the shape template exactly, cycle-edge markings match the
    template (the while/repeat loop-back is a cycle edge, nothing else is),
    and the three closedness conditions hold.
    """
    succ: dict[str, list[str]] = {v: [] for v in vertices}
    pred: dict[str, list[str]] = {v: [] for v in vertices}
    for a, b in edges:
        succ[a].append(b)
        pred[b].append(a)
    for lst in succ.values():
        lst.sort()
    cyc = _oracle_cycle_edges(vertices, succ, source)

    def closed(members: set[str], src: str, sink: str) -> bool:
        for x in members:
            if x != src and any(u not in members for u in pred[x]):
                return False
            if x != sink and any(w not in members for w in succ[x]):
                return False
        for a, b in cyc:
            if b == src and a not in succ[src]:
                return False
        return True

    def check(members: set[str], src: str, sink: str,
              shape_edges: set[tuple[str, str]],
              shape_cyc: set[tuple[str, str]]) -> bool:
        induced = {(a, b) for (a, b) in edges if a in members and b in members}
        if induced != shape_edges:
            return False
        for e in shape_edges:
            if (e in cyc) != (e in shape_cyc):
                return False
        return closed(members, src, sink)

    found: list[tuple[str, frozenset[str]]] = []
    for v in sorted(vertices):
        hits: list[frozenset[str]] = []
        outs = succ[v]
        for w in outs:
            # sequence
            if check({v, w}, v, w, {(v, w)}, set()):
                hits.append(frozenset({v, w}))
            # repeat
            for t in succ[w]:
                if t != v and t != w:
                    if check({v, w, t}, v, t, {(v, w), (w, v), (w, t)}, {(w, v)}):
                        hits.append(frozenset({v, w, t}))
            for t in outs:
                if t == w:
                    continue
                # if-then
                if check({v, w, t}, v, t, {(v, w), (v, t), (w, t)}, set()):
                    hits.append(frozenset({v, w, t}))
                # while
                if check({v, w, t}, v, t, {(v, w), (w, v), (v, t)}, {(w, v)}):
                    hits.append(frozenset({v, w, t}))
        # if-then-else / p-case over the full out-neighborhood
        if len(outs) >= 2:
            joins = set(succ[outs[0]])
            for t in sorted(joins):
                if t == v or t in outs:
                    continue
                members = {v, t, *outs}
                shape = {(v, w) for w in outs} | {(w, t) for w in outs}
                if check(members, v, t, shape, set()):
                    hits.append(frozenset(members))
        distinct = set(hits)
        if len(distinct) > 1:
            raise errors.OracleDivergence(
                f"two distinct primes rooted at {v!r}: {sorted(map(sorted, distinct))}"
            )
        if distinct:
            found.append((v, distinct.pop()))
    return found


def _naive_contract(
    vertices: frozenset[str],
    edges: frozenset[tuple[str, str]],
    source: str,
    prime: tuple[str, frozenset[str]],
) -> tuple[frozenset[str], frozenset[tuple[str, str]], str]:
    src, members = prime
    new_edges = set()
    for a, b in edges:
        na = src if a in members else a
        nb = src if b in members else b
        if na != nb:
            new_edges.add((na, nb))
    new_vertices = (vertices - members) | {src}
    new_source = src if source in members else source
    return frozenset(new_vertices), frozenset(new_edges), new_source


def oracle_reduce(
    g: FlowGraph,
    max_n: int = 12,
    max_states: int = 200_000,
) -> tuple[bool, int]:
    """Exhaustively search all contraction orders of g.

    Returns (reducible to the trivial graph, length of a maximal contraction
    sequence).  Every maximal sequence must have the same length and the
    same final size class; the search asserts this at each branch point and
    raises OracleDivergence otherwise.  Memoization keys on the exact
    labeled state, which is sound because coalesced vertices keep the prime
    source's name.
    """
    if g.n > max_n:
        raise errors.SearchBudgetExceeded(f"n={g.n} exceeds oracle guard {max_n}")
    memo: dict[tuple, tuple[bool, int]] = {}
    budget = max_states

    def explore(vs: frozenset[str], es: frozenset[tuple[str, str]], src: str) -> tuple[bool, int]:
        nonlocal budget
        key = (vs, es, src)
        hit = memo.get(key)
        if hit is not None:
            return hit
        budget -= 1
        if budget < 0:
            raise errors.SearchBudgetExceeded(f"more than {max_states} states explored")
        primes = _naive_primes(vs, es, src)
        if not primes:
            res = (len(vs) == 1, 0)
        else:
            outcomes = {explore(*_naive_contract(vs, es, src, pr)) for pr in primes}
            if len(outcomes) != 1:
                raise errors.OracleDivergence(
                    f"contraction orders disagree from a state with {len(vs)} vertices: {sorted(outcomes)}"
                )
            ok, k = outcomes.pop()
            res = (ok, k + 1)
        memo[key] = res
        return res

    return explore(frozenset(g.vertices), frozenset(g.edges), g.source)


def brute_force_isomorphism(g1: FlowGraph, g2: FlowGraph, max_n: int = 8) -> dict[str, str] | None:
    """Backtracking search for a source-preserving isomorphism.

    Independent of canonical codes; intended as a cross-check on small
    graphs.  Returns a mapping or None.
    """
    if g1.n > max_n or g2.n > max_n:
        raise errors.SearchBudgetExceeded(f"graphs exceed brute-force guard {max_n}")
    if g1.n != g2.n or g1.m != g2.m:
        return None

    def degrees(g: FlowGraph) -> dict[str, tuple[int, int]]:
        return {v: (len(g.pred[v]), len(g.succ[v])) for v in g.vertices}

    d1 = degrees(g1)
    d2 = degrees(g2)
    if sorted(d1.values()) != sorted(d2.values()):
        return None
    order = sorted(g1.vertices, key=lambda v: (v != g1.source, v))
    used: set[str] = set()
    mapping: dict[str, str] = {}

    def consistent(v: str, w: str) -> bool:
        if d1[v] != d2[w]:
            return False
        for u in g1.pred[v]:
            fu = mapping.get(u)
            if fu is not None and (fu, w) not in g2.edges:
                return False
        for u in g1.succ[v]:
            fu = mapping.get(u)
            if fu is not None and (w, fu) not in g2.edges:
                return False
        return True

    def backtrack(i: int) -> bool:
        if i == len(order):
            return all((mapping[a], mapping[b]) in g2.edges for a, b in g1.edges)
        v = order[i]
        candidates = [g2.source] if v == g1.source else sorted(g2.vertices - used)
        for w in candidates:
            if w in used or not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if backtrack(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    if backtrack(0):
        return dict(mapping)
    return None
