"""Exception hierarchy.

Every error carries a short machine-readable ``category`` so the command
line front end can report failures without parsing messages.
"""


class LabError(Exception):
    category = "error"


class PreconditionError(LabError, ValueError):
    category = "precondition"


class DomainError(LabError, ValueError):
    category = "domain"


class ResourceLimitError(LabError):
    category = "resource-limit"


class InfeasibleBudgetError(LabError):
    category = "infeasible-budget"


class ResolutionError(LabError):
    category = "resolution"

    def __init__(self, message, required_k=None):
        super().__init__(message)
        self.required_k = required_k


class PoleError(DomainError):
    category = "pole"


class HeightRangeError(DomainError):
    category = "range"


class CapabilityError(LabError):
    category = "capability"


class ContourError(LabError):
    category = "contour"

    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


class DominanceError(LabError):
    category = "dominance"

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class DegreeLimitError(LabError):
    category = "degree-limit"


class ApproximationFailure(LabError):
    category = "approximation-failure"

    def __init__(self, message, best_error):
        super().__init__(message)
        self.best_error = best_error


class GeometryError(LabError):
    category = "geometry"


class SourceLimitError(LabError):
    category = "source-limit"
