"""Exception hierarchy shared by every linlayout module."""

from __future__ import annotations


class LayoutError(ValueError):
    """Base class for invalid layouts, shapes and algebra inputs."""

    pass


class DimensionMismatchError(LayoutError):
    """Raised when two matrices or bases do not have conformable sizes."""

    pass


class NotSurjectiveError(LayoutError):
    """Raised when an operation needs a surjective map and gets something else."""

    def __init__(self, message: str, row: int | None = None) -> None:
        super().__init__(message)
        self.row = row


class UnsolvableError(LayoutError):
    """Raised when a column of the right-hand side is outside the column span."""

    def __init__(self, message: str, column: int) -> None:
        super().__init__(message)
        self.column = column


class DivisionError(LayoutError):
    """Raised when a matrix is not block diagonal with the requested divisor."""

    def __init__(self, message: str, row: int, col: int) -> None:
        super().__init__(message)
        self.row = row
        self.col = col


class DependentBasisError(LayoutError):
    """Raised when a basis contains zero or linearly dependent vectors."""

    pass


class LabelMismatchError(LayoutError):
    """Raised when dimension labels of composed layouts do not line up."""

    pass


class LayoutSpecError(LayoutError):
    """Raised for invalid constructor parameters (blocked, mma, swizzle)."""

    pass


class LayoutParseError(LayoutError):
    """Raised for malformed layout or graph text."""

    def __init__(self, message: str, line_no: int | None = None) -> None:
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ShapeOpError(LayoutError):
    """Raised when a shape operation cannot be applied to a layout."""

    pass


class NotInImageError(ShapeOpError):
    """Raised when a layout is not produced by the forward transfer of an op."""

    pass


class PropagationError(LayoutError):
    """Raised for invalid op graphs or anchors."""

    pass


class UnreachableValueError(PropagationError):
    """Raised when no anchor layout reaches a value of the graph."""

    def __init__(self, message: str, value_id: int) -> None:
        super().__init__(message)
        self.value_id = value_id


class PlanError(LayoutError):
    """Raised when a conversion or gather plan cannot be built."""

    pass


class TileMismatchError(PlanError):
    """Raised when no register permutation makes a layout divisible by a tile."""

    pass


class SimulationError(RuntimeError):
    """Raised when a plan references lanes or registers that do not exist."""

    pass
