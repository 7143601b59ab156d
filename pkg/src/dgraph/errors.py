"""Exception types raised across the package."""


class DGraphError(Exception):
    """Base class for all errors raised by this package."""


# -- graph construction -------------------------------------------------

class DuplicateVertex(DGraphError):
    pass


class UnknownEndpoint(DGraphError):
    pass


class SelfLoop(DGraphError):
    pass


class ParallelEdge(DGraphError):
    pass


class SourceMissing(DGraphError):
    pass


class InvalidName(DGraphError):
    pass


# -- traversal -----------------------------------------------------------

class CycleRemains(DGraphError):
    """The supplied cycle-edge set does not make the graph acyclic."""


# -- prime matching / rewriting -------------------------------------------

class InvalidMatch(DGraphError):
    """A prime match failed re-validation against the graph."""


class NameCollision(DGraphError):
    pass


class ArityMismatch(DGraphError):
    pass


# -- witness replay --------------------------------------------------------

class InvalidStep(DGraphError):
    """A recorded contraction step does not apply to the evolving graph."""

    def __init__(self, index: int, message: str):
        super().__init__(f"step {index}: {message}")
        self.index = index


# -- canonical codes ---------------------------------------------------------

class NotDijkstraError(DGraphError):
    """The operation requires a Dijkstra graph and the input is not one."""


# -- generator / oracle -------------------------------------------------------

class NoApplicablePerturbation(DGraphError):
    pass


class SearchBudgetExceeded(DGraphError):
    pass


class OracleDivergence(DGraphError):
    """Two maximal contraction orders disagreed; this should be impossible."""


# -- file formats ----------------------------------------------------------------

class ParseError(DGraphError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line
        self.message = message


class MissingSource(ParseError):
    pass
