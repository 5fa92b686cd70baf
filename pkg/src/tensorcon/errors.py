"""tensorcon.errors -- Exception hierarchy shared by every module."""

from __future__ import annotations

from typing import Any


class TensorconError(ValueError):
    """Base class for all tensorcon errors."""


class ExprSyntaxError(TensorconError):
    """Expression text does not conform to the grammar.

    Attributes:
        position: 0-based character offset of the offending token.
    """

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ExprSyntaxError):
    """An identifier is neither a variable, a constant nor a function."""


class UnboundVariableError(TensorconError):
    """A variable has no value in the evaluation point."""

    def __init__(self, name: str) -> None:
        super().__init__(f"unbound variable '{name}'")
        self.name = name


class EvaluationDomainError(TensorconError):
    """Evaluation left the domain of a node (division by zero, ln of a non-positive, ...).

    Attributes:
        node: Text of the offending sub-expression.
    """

    def __init__(self, reason: str, node: str) -> None:
        super().__init__(f"{reason} in '{node}'")
        self.reason = reason
        self.node = node


class DomainSpecError(TensorconError):
    """Invalid domain: degenerate interval, duplicate names, unsupported dimension."""


class ConstraintError(TensorconError):
    """Invalid constraint: bad axis, point outside the interval, duplicate (p, d)."""


class IncompatibleConstraintsError(TensorconError):
    """Constraints disagree where they intersect.

    Attributes:
        mismatch: Magnitude of the largest disagreement.
        location: Description of where it was found.
    """

    def __init__(self, message: str, mismatch: float = float("nan"), location: str = "") -> None:
        super().__init__(message)
        self.mismatch = mismatch
        self.location = location


class SingularSystemError(TensorconError):
    """A constraint-functional matrix cannot be inverted.

    Attributes:
        matrix: The offending matrix (numpy array).
        column: Index of the column found to be dependent, or -1.
        suggestion: Hint for an alternative support basis.
    """

    def __init__(self, message: str, matrix: Any, column: int = -1, suggestion: str = "") -> None:
        text = message
        if column >= 0:
            text += f" (dependent column {column})"
        if suggestion:
            text += f"; {suggestion}"
        super().__init__(text)
        self.matrix = matrix
        self.column = column
        self.suggestion = suggestion


class ComboNotTabulatedError(TensorconError):
    """The boundary-constraint combination has no tabulated vectors."""


class RankDeficientError(TensorconError):
    """The collocation system does not have full column rank.

    Attributes:
        rank: Effective numerical rank.
        columns: Number of columns after pruning.
    """

    def __init__(self, rank: int, columns: int) -> None:
        super().__init__(f"rank-deficient collocation system: effective rank {rank} of {columns}")
        self.rank = rank
        self.columns = columns


class ConfigError(TensorconError):
    """Configuration file cannot be read or is inconsistent.

    Attributes:
        path: Config file path.
        line: 1-based line number, or 0 when unknown.
    """

    def __init__(self, message: str, path: str = "", line: int = 0) -> None:
        where = path
        if line:
            where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line
