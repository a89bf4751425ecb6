"""Errors raised on invalid networks, trips and optimizer settings.

Every input error derives from :class:`ValueError`, so code that only cares about
bad input can keep catching ``ValueError``.
"""


class NetworkError(ValueError):
    """Base class of invalid road networks."""


class DisconnectedGraphError(NetworkError):
    """The road graph has more than one connected component."""


class DuplicateEdgeError(NetworkError):
    """Two roads connect the same pair of nodes."""


class NonPositiveLengthError(NetworkError):
    """A road length is zero, negative or not finite."""


class SelfLoopError(NetworkError):
    """A road starts and ends at the same node."""


class UnknownNodeError(NetworkError):
    """A node id does not exist in the network."""


class MalformedColumnError(NetworkError):
    """An incidence matrix column does not contain exactly two 1s."""


class LengthCountMismatchError(NetworkError):
    """Number of road lengths differs from the number of incidence columns."""


class DemandError(ValueError):
    """Base class of invalid trips and demand settings."""


class EmptyAreaClassError(DemandError):
    """A weighted area class has no (or too few) nodes to draw from."""


class SchemaError(DemandError):
    """A trips file does not match the expected record layout."""


class RouteNotConnectedError(DemandError):
    """Consecutive route nodes are not joined by a road, or endpoints mismatch."""


class SocOutOfRangeError(DemandError):
    """Initial SOC is not within (0, capacity]."""


class DetourIndexError(IndexError):
    """A detour budget m outside 0..n was requested."""


class OptimizerError(ValueError):
    """Base class of invalid optimizer settings."""


class InvalidCardinalityError(OptimizerError):
    """The number of stations k is not within 0..N."""


class ZeroTotalFitError(OptimizerError):
    """Roulette selection got fit values that do not sum to a positive number."""


class SearchSpaceTooLargeError(OptimizerError):
    """Exhaustive enumeration would visit more deployments than allowed."""

    def __init__(self, num_candidates, max_candidates):
        self.num_candidates = num_candidates
        self.max_candidates = max_candidates
        super().__init__(
            f"Exhaustive search needs {num_candidates} evaluations,"
            f" more than the allowed {max_candidates}!"
        )
