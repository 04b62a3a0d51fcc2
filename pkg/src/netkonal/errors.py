"""Exception types shared across the package."""


class NetkonalError(Exception):
    """Base class for all package errors."""


class NetworkError(NetkonalError):
    """Invalid network data."""


class DuplicateVertex(NetworkError):
    pass


class UnknownVertex(NetworkError):
    pass


class UnknownEdge(NetworkError):
    pass


class SelfLoop(NetworkError):
    """An edge must join two distinct vertices."""


class DuplicateEdge(NetworkError):
    """At most one edge may join any unordered vertex pair (and edge ids are unique)."""


class NonPositiveLength(NetworkError):
    pass


class DisconnectedGraph(NetworkError):
    """Every pair of vertices must be joined by a path of edges."""


class DegreeOneNotBoundary(NetworkError):
    """A vertex incident to exactly one edge must carry boundary data."""


class EmptyBoundary(NetworkError):
    pass


class InvalidPoint(NetworkError):
    """Arclength parameter outside the edge, or malformed point description."""


class BracketOverflow(NetkonalError):
    """No sign change found before the search bracket hit its size limit."""


class UncertifiedHamiltonian(NetkonalError):
    """Operation requires a Hamiltonian satisfying the certified restrictions."""


class UnsupportedFamily(NetkonalError):
    """Operation is only available for the built-in cost-based families."""


class TooLargeForOracle(NetkonalError):
    """Brute-force path enumeration is guarded to small networks."""


class GridMismatch(NetkonalError):
    """Value data does not match the discretization it is checked against."""


class PreconditionNotChecked(NetkonalError):
    """A probe was fed inputs that fail its stated preconditions."""


class ParseError(NetkonalError):
    """Malformed problem description file."""


class MissingBoundaryData(NetkonalError):
    """Boundary values are required but absent or incomplete."""


class NoReference(NetkonalError):
    """No closed-form or user-supplied reference solution is available."""
