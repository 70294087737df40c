"""Exception hierarchy shared across the package."""


class GraphBanditError(Exception):
    """Base class for all package errors."""


class BadInput(GraphBanditError, ValueError):
    """Malformed user input (files, specs, arguments)."""


class GraphParseError(BadInput):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class ContractViolation(GraphBanditError):
    """A precondition or runtime invariant was violated."""


class InfeasibleError(ContractViolation):
    """The domination LP has no feasible point: some vertex of U is unobservable."""

    def __init__(self, vertex, message=None):
        self.vertex = vertex
        super().__init__(message or f"vertex {vertex} has no self-loop and no in-neighbor")


class NotOneDegenerate(ContractViolation):
    pass


class TooLarge(ContractViolation):
    """Exponential enumeration refused for the given size."""
