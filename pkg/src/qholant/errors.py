"""Exception hierarchy."""


class HolantError(Exception):
    """Base class for every error raised by qholant."""


class LabelError(HolantError, ValueError):
    pass


class DimensionError(HolantError, ValueError):
    pass


class SizeGuardError(HolantError, ValueError):
    """An operator or state space exceeds the desk-scale size limits."""


class PSDError(HolantError, ValueError):
    """Input is not Hermitian positive semidefinite within tolerance."""


class InvariantError(HolantError, ValueError):
    """A graph or transform invariant is violated.

    ``where`` names the offending node, factor or edge and ``residual`` holds
    the measured violation when there is one.
    """

    def __init__(self, message, where=None, residual=None):
        super().__init__(message)
        self.where = where
        self.residual = residual


class TransformError(HolantError, ValueError):
    """Transform set is structurally incompatible with the graph."""


class FormMismatchError(HolantError, ArithmeticError):
    """Two algebraically equal evaluation routes disagree numerically."""


class DegenerateModelError(HolantError, ArithmeticError):
    pass


class DocumentError(HolantError, ValueError):
    """Malformed input document; ``position`` is a line/column or JSON path."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{position}: {message}"
        super().__init__(message)
        self.position = position
