"""Dense solves, sup norms and grid functions."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SingularMatrixError

__all__ = ["lu_solve", "sup_norm", "GridFunction", "PIVOT_RTOL", "RESIDUAL_RTOL"]

PIVOT_RTOL = 1e-14
RESIDUAL_RTOL = 1e-10


def sup_norm(v) -> float:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise ValueError("sup norm of an empty vector")
    return float(np.max(np.abs(v)))


def lu_solve(m, rhs, iteration=None) -> np.ndarray:
    """Solve ``m x = rhs`` by LU with partial pivoting.

    A pivot below ``PIVOT_RTOL * max|m|`` raises :class:`SingularMatrixError`
    tagged with ``iteration``.  Under ``__debug__`` the back-substituted
    residual is checked against ``RESIDUAL_RTOL (1 + |rhs|)``.
    """
    m = np.asarray(m, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if rhs.shape != (m.shape[0],):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({m.shape[0]},)")
    if not np.all(np.isfinite(m)) or not np.all(np.isfinite(rhs)):
        raise SingularMatrixError("non-finite entries in the linear system", iteration=iteration)
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError("zero matrix", iteration=iteration)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if np.min(pivots) < PIVOT_RTOL * scale:
        j = int(np.argmin(pivots))
        raise SingularMatrixError(f"pivot {pivots[j]:.3e} in column {j} is numerically zero", iteration=iteration)
    x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    if __debug__:
        res = sup_norm(m @ x - rhs)
        if res > RESIDUAL_RTOL * (1.0 + sup_norm(rhs)):
            raise SingularMatrixError(f"solve residual {res:.3e} exceeds tolerance", iteration=iteration)
    return x


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on a fixed set of nodes, extended piecewise linearly when called."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.shape != values.shape or nodes.ndim != 1:
            raise ValueError("nodes and values must be 1-d arrays of equal length")
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __call__(self, s):
        out = np.interp(s, self.nodes, self.values)
        return float(out) if np.ndim(s) == 0 else out

    def sup_norm(self) -> float:
        return sup_norm(self.values)

    @classmethod
    def zeros(cls, nodes) -> "GridFunction":
        return cls(nodes, np.zeros(np.shape(nodes)))
