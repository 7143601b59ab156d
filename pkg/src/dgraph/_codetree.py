"""Nested token trees for canonical codes.

A code cell is a list whose elements are ints (statement type codes, always
>= 2), strings (a vertex's own token, flattened to 1 and recorded as
provenance), or nested cells absorbed from contracted neighbors.  Keeping
absorbed cells by reference instead of splicing their tokens keeps code
construction linear; everything here is iterative because cells nest as
deeply as the longest chain in the graph.
"""

from __future__ import annotations

from collections.abc import Iterator


def iter_tokens(cell: list) -> Iterator[int]:
    """Yield the flattened integer tokens of a cell."""
    stack = [iter(cell)]
    while stack:
        it = stack[-1]
        for x in it:
            t = type(x)
            if t is int:
                yield x
            elif t is str:
                yield 1
            else:
                stack.append(iter(x))
                break
        else:
            stack.pop()


def compare(a: list, b: list) -> int:
    """Lexicographic comparison of two cells' token streams.

    Tokens compare numerically; on exhaustion the shorter stream sorts
    first.  Returns -1, 0 or 1.
    """
    ita = iter_tokens(a)
    itb = iter_tokens(b)
    missing = -1  # tokens are >= 1, so -1 marks exhaustion
    while True:
        x = next(ita, missing)
        y = next(itb, missing)
        if x != y:
            return -1 if x < y else 1
        if x == missing:
            return 0


def flatten(cell: list) -> tuple[list[int], list[str]]:
    """Flatten a cell into (tokens, vertex names behind the 1 tokens)."""
    tokens: list[int] = []
    ones: list[str] = []
    stack = [iter(cell)]
    while stack:
        it = stack[-1]
        for x in it:
            t = type(x)
            if t is int:
                tokens.append(x)
            elif t is str:
                ones.append(x)
                tokens.append(1)
            else:
                stack.append(iter(x))
                break
        else:
            stack.pop()
    return tokens, ones
