"""Canonical codes and isomorphism of Dijkstra graphs.

A Dijkstra graph's code is a sequence of integer tokens built during the
bottom-up contraction pass: every vertex starts as the token 1, and when a
prime rooted at v is contracted the shape's type code plus the already-final
codes of its other members are appended to v's code (branch codes of
convergent shapes sorted lexicographically).  Two Dijkstra graphs are
isomorphic exactly when their codes are token-identical, and pairing the
vertices behind the 1 tokens at identical positions yields an isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import errors
from ._codetree import flatten
from .flowgraph import FlowGraph
from .recognizer import PassStats, Status, Verdict, _run_reduction


@dataclass(frozen=True)
class CanonicalCode:
    """Integer-token code of a Dijkstra graph.

    `tokens` contains n ones (one per vertex) and one type code per
    contraction; `ones` names the original vertex behind each 1 token, in
    token order.
    """

    tokens: tuple[int, ...]
    ones: tuple[str, ...]

    @cached_property
    def provenance(self) -> dict[int, str]:
        """Map each position holding token 1 to the vertex it denotes."""
        out: dict[int, str] = {}
        it = iter(self.ones)
        for pos, tok in enumerate(self.tokens):
            if tok == 1:
                out[pos] = next(it)
        return out

    @property
    def line(self) -> str:
        """The stable serialized form: tokens in decimal, space-joined."""
        return " ".join(map(str, self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class IsoMapping:
    """A certified isomorphism between two Dijkstra graphs."""

    pairs: tuple[tuple[str, str], ...]

    @cached_property
    def mapping(self) -> dict[str, str]:
        return dict(self.pairs)

    def __getitem__(self, v: str) -> str:
        return self.mapping[v]

    def __len__(self) -> int:
        return len(self.pairs)


def parse_code_line(line: str) -> tuple[int, ...]:
    """Parse the space-joined decimal serialization of a code."""
    try:
        tokens = tuple(int(tok) for tok in line.split())
    except ValueError as exc:
        raise ValueError(f"malformed code line {line!r}") from exc
    if not tokens:
        raise ValueError("empty code line")
    return tokens


def canonical_code(g: FlowGraph, stats: PassStats | None = None) -> CanonicalCode:
    """Compute the canonical code of a Dijkstra graph.

    Raises NotDijkstraError when the contraction pass does not reduce g to
    the trivial graph (including unreachable-vertex inputs, which are not
    flow graphs at all).
    """
    verdict, code = analyze(g, stats=stats)
    if code is None:
        raise errors.NotDijkstraError(_describe_failure(verdict))
    return code


def analyze(
    g: FlowGraph, stats: PassStats | None = None
) -> tuple[Verdict, CanonicalCode | None]:
    """Run recognition and canonical coding in a single fused pass.

    The code is present exactly when the verdict is DIJKSTRA.
    """
    verdict, work, root = _run_reduction(g, want_codes=True, stats=stats)
    if verdict.status is not Status.DIJKSTRA:
        return verdict, None
    tokens, ones = flatten(root)
    return verdict, CanonicalCode(tuple(tokens), tuple(ones))


def _describe_failure(verdict: Verdict) -> str:
    reason = verdict.reason.value if verdict.reason else "unknown"
    return f"not a Dijkstra graph ({reason}: {verdict.detail})"


def is_isomorphic(g1: FlowGraph, g2: FlowGraph) -> IsoMapping | None:
    """Decide isomorphism of two Dijkstra graphs.

    Returns the vertex mapping extracted from the matching positions of the
    1 tokens when the codes agree, validated edge-by-edge; returns None when
    the codes differ.  Raises NotDijkstraError (naming the offending input)
    when either graph is not a Dijkstra graph.
    """
    try:
        c1 = canonical_code(g1)
    except errors.NotDijkstraError as exc:
        raise errors.NotDijkstraError(f"first graph: {exc}") from None
    try:
        c2 = canonical_code(g2)
    except errors.NotDijkstraError as exc:
        raise errors.NotDijkstraError(f"second graph: {exc}") from None
    if c1.tokens != c2.tokens:
        return None
    pairs = tuple(zip(c1.ones, c2.ones))
    _validate_mapping(g1, g2, pairs)
    return IsoMapping(pairs)


def _validate_mapping(g1: FlowGraph, g2: FlowGraph, pairs: tuple[tuple[str, str], ...]) -> None:
    mapping = dict(pairs)
    ok = (
        len(mapping) == g1.n == g2.n
        and len(set(mapping.values())) == g2.n
        and mapping[g1.source] == g2.source
        and g1.m == g2.m
        and all((mapping[a], mapping[b]) in g2.edges for a, b in g1.edges)
    )
    if not ok:
        raise RuntimeError(
            "internal error: equal codes produced a mapping that fails edge validation"
        )
