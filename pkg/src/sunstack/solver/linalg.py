"""Tridiagonal solves.

Row ``i`` of the system reads ``lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]``;
``lower[0]`` and ``upper[-1]`` are ignored.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from sunstack.config.models import LinearSolver
from sunstack.config.validators import log_debug

_PIVOT_RTOL = 1e-14

# "auto" hands larger systems to LAPACK
THOMAS_MAX_SIZE = 64


class _BadPivot(ArithmeticError):
    pass


def thomas(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Thomas algorithm without pivoting.

    Raises:
        ArithmeticError: On a vanishing pivot.
    """
    a = lower.tolist()
    b = diag.tolist()
    c = upper.tolist()
    d = rhs.tolist()
    n = len(b)
    cp = [0.0] * n
    dp = [0.0] * n

    beta = b[0]
    if abs(beta) <= _PIVOT_RTOL * (abs(b[0]) + abs(c[0])) or beta == 0.0:
        raise _BadPivot("zero pivot in row 0")
    cp[0] = c[0] / beta
    dp[0] = d[0] / beta
    for i in range(1, n):
        coupling = a[i] * cp[i - 1]
        beta = b[i] - coupling
        if beta == 0.0 or abs(beta) <= _PIVOT_RTOL * (abs(b[i]) + abs(coupling)):
            raise _BadPivot(f"vanishing pivot in row {i}")
        cp[i] = c[i] / beta
        dp[i] = (d[i] - a[i] * dp[i - 1]) / beta

    x = [0.0] * n
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.asarray(x)


def banded(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """LU with partial pivoting via :func:`scipy.linalg.solve_banded`."""
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    return scipy.linalg.solve_banded((1, 1), ab, rhs, check_finite=False)


def solve_tridiagonal(
    lower: np.ndarray,
    diag: np.ndarray,
    upper: np.ndarray,
    rhs: np.ndarray,
    method: LinearSolver = "auto",
) -> np.ndarray:
    """Solve a tridiagonal system.

    ``"auto"`` uses Thomas up to :data:`THOMAS_MAX_SIZE` unknowns and banded LU
    beyond. Thomas falls back to pivoted LU on a vanishing pivot.
    """
    if method == "banded" or (method == "auto" and diag.size > THOMAS_MAX_SIZE):
        return banded(lower, diag, upper, rhs)
    try:
        x = thomas(lower, diag, upper, rhs)
    except ArithmeticError as exc:
        log_debug("Thomas solve failed, using banded LU", reason=str(exc))
        return banded(lower, diag, upper, rhs)
    if not np.all(np.isfinite(x)):
        log_debug("Thomas solve produced non-finite values, using banded LU")
        return banded(lower, diag, upper, rhs)
    return x


__all__ = ["THOMAS_MAX_SIZE", "thomas", "banded", "solve_tridiagonal"]
