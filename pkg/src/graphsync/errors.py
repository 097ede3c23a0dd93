"""Exception types shared across the package."""


class GraphSyncError(Exception):
    """Base class for all errors raised by this package."""


class GraphConstructionError(GraphSyncError, ValueError):
    """Invalid graph input."""


class VertexIndexError(GraphConstructionError):
    """Edge endpoint outside the 1..n vertex range."""


class SelfLoopError(GraphConstructionError):
    """Edge joining a vertex to itself."""


class DuplicateEdgeError(GraphConstructionError):
    """Unordered vertex pair listed more than once."""


class NegativeWeightError(GraphConstructionError):
    """Edge weight below zero."""


class UnknownGraphNameError(GraphConstructionError, KeyError):
    """Graph name not in the named-topology registry."""


class DomainError(GraphSyncError, ValueError):
    """Arguments outside the domain a rule or potential is defined on."""


class DimensionError(GraphSyncError, ValueError):
    """Operation requested for a vertex count it does not support."""


class BoundarySingularityError(GraphSyncError, ValueError):
    """Derivative requested at a point where it diverges."""


class DegenerateDerivativeError(GraphSyncError, ValueError):
    """Coupling-weight derivative is infinite at the evaluation point."""


class SimplexViolationError(GraphSyncError, ValueError):
    """Density vector left the probability simplex beyond tolerance."""


class NonFiniteStateError(GraphSyncError, ArithmeticError):
    """NaN or infinity produced during time integration.

    Carries the trajectory recorded up to the failing step in
    ``trajectory`` (may be ``None`` for direct evaluations).
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class ConsistencyError(GraphSyncError, ValueError):
    """Transformed variables no longer satisfy their defining relation."""


class QuadratureError(GraphSyncError, ArithmeticError):
    """Adaptive quadrature failed to converge or met a divergent integrand."""


class InversionRangeError(GraphSyncError, ValueError):
    """Inversion target lies outside the range of the coordinate map."""


class UnsupportedRegimeError(GraphSyncError, ValueError):
    """Parameter combination outside the regime the analytics cover."""
