"""Exception types raised across the package.

Each error maps to a CLI exit code: input-format problems exit with 2,
violated preconditions with 3 and internal guards with 4.
"""


class MPDAGError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class FormatError(MPDAGError):
    exit_code = 2


class ParseError(FormatError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateAdjacency(FormatError):
    pass


class UnknownNode(MPDAGError, KeyError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"unknown node {node!r}")

    def __str__(self):
        return self.args[0]


class InvalidPath(MPDAGError):
    pass


class SameNode(MPDAGError):
    pass


class NotADAG(MPDAGError):
    pass


class InconsistentOrientation(MPDAGError):
    pass


class ConstructFail(MPDAGError):
    def __init__(self, edge, reason):
        self.edge = edge
        super().__init__(f"background edge {edge[0]} -> {edge[1]} rejected: {reason}")


class TooLarge(MPDAGError):
    exit_code = 4


class RootAssumptionViolated(MPDAGError):
    pass


class TooManyEdges(MPDAGError):
    pass


class NoNoiseRetained(MPDAGError):
    pass


class MissingGraph(MPDAGError):
    pass


class SchemaMismatch(MPDAGError):
    exit_code = 2


class RankDeficientWarning(UserWarning):
    """Design matrix lost column rank; the least-norm solution was used."""
