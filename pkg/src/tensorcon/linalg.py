"""tensorcon.linalg -- Small dense solves shared by the builders."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sl

from tensorcon.errors import SingularSystemError

RCOND_LIMIT = 1e-12


def reciprocal_condition(matrix: np.ndarray) -> float:
    """1-norm reciprocal condition number; 0 for singular or empty-rank matrices."""
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(matrix, 1)
    if not np.isfinite(cond) or cond == 0.0:
        return 0.0
    return 1.0 / cond


def dependent_column(matrix: np.ndarray) -> int:
    """Column carrying the largest weight of the numerical null vector."""
    _, _, vh = np.linalg.svd(matrix)
    return int(np.argmax(np.abs(vh[-1])))


def invert(matrix: np.ndarray, what: str, suggestion: str = "") -> np.ndarray:
    """Inverse of a small functional matrix via LU with partial pivoting.

    Raises:
        SingularSystemError: Reciprocal condition below ``RCOND_LIMIT``.
    """
    matrix = np.asarray(matrix, dtype=float)
    if reciprocal_condition(matrix) < RCOND_LIMIT:
        raise SingularSystemError(
            f"singular {what} matrix {np.array2string(matrix, precision=6)}",
            matrix,
            dependent_column(matrix),
            suggestion,
        )
    lu = sl.lu_factor(matrix)
    inverse = sl.lu_solve(lu, np.eye(matrix.shape[0]))
    # exact zeros keep the assembled blends short
    scale = np.max(np.abs(inverse))
    inverse[np.abs(inverse) < 1e-15 * scale] = 0.0
    return inverse
