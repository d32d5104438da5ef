"""Discretize first, then apply Newton's method to the finite system.

Singularity subtraction turns the equation into ``F_n(x) = 0`` on the grid:

    F_n(x)_i = x_i - sum_j W_ij N(t_i, t_j, x_j)
               + N(t_i, t_i, x_i) (sum_j W_ij - f(t_i)) - y(t_i)

with ``W_ij = w_j g_delta(|t_i - t_j|)`` and ``f`` the exact line integral of
``g``.  Each Newton step solves ``(I - A - B) x_next = a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._control import stop_reason
from .diagnostics import IterationRecord, grid_relative_error, make_record, relative_residual_from_values
from .linalg import GridFunction, lu_solve, sup_norm
from .problem import Assembly, Discretization, ProblemInstance, assembly

__all__ = [
    "ClassicalState",
    "assemble_residual_Fn",
    "newton_blocks",
    "assemble_newton_system",
    "jacobian",
    "solve_classical",
]


@dataclass
class ClassicalState:
    iterate: GridFunction
    k: int
    history: list = field(default_factory=list)
    fn_norms: list = field(default_factory=list)
    """``|F_n(x_k)|`` per iteration; the finite system's own residual."""
    stop: Optional[str] = None


def _values_on_grid(x, asm: Assembly) -> np.ndarray:
    if isinstance(x, GridFunction):
        if x.nodes is not asm.t and not np.array_equal(x.nodes, asm.t):
            raise ValueError("grid function lives on different nodes than the rule")
        return x.values
    x = np.asarray(x, dtype=float)
    if x.shape != asm.t.shape:
        raise ValueError(f"expected {asm.t.size} grid values, got shape {x.shape}")
    return x


def _pairwise(asm: Assembly, fn, x):
    t = asm.t
    return fn(t[:, None], t[None, :], x[None, :])


def assemble_residual_Fn(x, p: ProblemInstance, d: Discretization) -> np.ndarray:
    asm = assembly(p, d)
    x = _values_on_grid(x, asm)
    N, t = p.nonlinearity, asm.t
    coupling = np.einsum("ij,ij->i", asm.W, _pairwise(asm, N, x))
    return x - coupling + N(t, t, x) * (asm.row_sums - asm.f_classical) - asm.y_t


def newton_blocks(x, p: ProblemInstance, d: Discretization):
    """``(A, B_diag, a)`` of the Newton step at ``x``; ``B`` is returned as its diagonal."""
    asm = assembly(p, d)
    x = _values_on_grid(x, asm)
    N, t = p.nonlinearity, asm.t
    dN_pair = _pairwise(asm, N.derivative, x)
    A = asm.W * dN_pair
    gap = asm.f_classical - asm.row_sums
    dN_diag = N.derivative(t, t, x)
    B_diag = dN_diag * gap
    a = (
        asm.y_t
        + (N(t, t, x) - x * dN_diag) * gap
        + np.einsum("ij,ij->i", asm.W, _pairwise(asm, N, x) - dN_pair * x[None, :])
    )
    return A, B_diag, a


def jacobian(x, p: ProblemInstance, d: Discretization) -> np.ndarray:
    """``F_n'(x) = I - A - B``."""
    A, B_diag, _ = newton_blocks(x, p, d)
    J = -A
    J[np.diag_indices_from(J)] += 1.0 - B_diag
    return J


def assemble_newton_system(x, p: ProblemInstance, d: Discretization):
    """Matrix ``I - A - B`` and right-hand side ``a``."""
    A, B_diag, a = newton_blocks(x, p, d)
    M = -A
    M[np.diag_indices_from(M)] += 1.0 - B_diag
    return M, a


def solve_classical(p: ProblemInstance, d: Discretization, x0=None):
    """Run Newton from ``x0`` (default: zero) and return ``(state, final iterate)``.

    ``r`` in the history is the grid-valued residual of the continuous
    equation, with the iterate extended piecewise linearly between nodes.
    """
    asm = assembly(p, d)
    x = np.zeros_like(asm.t) if x0 is None else np.array(_values_on_grid(x0, asm), dtype=float)
    state = ClassicalState(iterate=GridFunction(asm.t, x), k=0)
    while True:
        g = state.iterate
        r = relative_residual_from_values(asm, g.values, g(asm.tau))
        e = None if p.exact_solution is None else grid_relative_error(g.values, p.exact_solution, d.rule)
        state.history.append(make_record(state.k, r, e, state.history[-1] if state.history else None))
        state.fn_norms.append(sup_norm(assemble_residual_Fn(g, p, d)))
        state.stop = stop_reason(state.history, d)
        if state.stop is not None:
            return state, state.iterate
        M, rhs = assemble_newton_system(g, p, d)
        x_next = lu_solve(M, rhs, iteration=state.k + 1)
        state.iterate = GridFunction(asm.t, x_next)
        state.k += 1
