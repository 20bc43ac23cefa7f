"""Exception taxonomy shared across the package."""


class SubmodInfoError(Exception):
    """Base class for all library-raised errors."""


class ValidationError(SubmodInfoError, ValueError):
    """Malformed arguments, parameters, or instance payloads."""


class GroundSetMismatchError(SubmodInfoError):
    """Operands belong to different ground sets."""


class PreconditionError(SubmodInfoError):
    """A documented precondition of a closed form or driver was violated."""


class ClosedFormUnavailable(SubmodInfoError):
    """The requested measure has no closed form for this function family."""


class ResourceLimitError(SubmodInfoError):
    """The request exceeds the exhaustive-evaluation budget."""


class StructuralError(SubmodInfoError):
    """An optimizer's structural requirements on the objective are not met."""


class DegenerateInstanceError(SubmodInfoError):
    """The instance has no usable elements (for example, every element is a dummy)."""
