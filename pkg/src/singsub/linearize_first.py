"""Linearize first: Newton-Kantorovich in function space, each step discretized.

Step ``k`` solves the linear equation ``(I - T(phi_k)) phi_next = K(phi_k) -
T(phi_k) phi_k + y`` where ``T(phi)`` is the derivative of ``K`` at ``phi``.
On the grid this is the system ``(I - C - D) w = b``; the continuous iterate
is then recovered at any ``s`` by the natural interpolation formula

    phi_next(s) = [sum_j C(s, j) w_j + z(s)] / [1 - I(s) + Q(s)]

which reproduces ``w`` at the nodes.  Integrals against ``phi_k`` use the
fine rule in subtracted form.
"""

from __future__ import annotations

import threading
from typing import Callable, Optional

import numpy as np

from ._control import stop_reason
from .diagnostics import grid_relative_error, make_record, relative_residual_from_values
from .errors import InterpolationDegeneracyError
from .linalg import GridFunction, lu_solve
from .problem import Assembly, Discretization, ProblemInstance, assembly

__all__ = [
    "NkIterate",
    "nk_blocks",
    "assemble_nk_system",
    "natural_interpolate",
    "solve_linearize_first",
    "DENOMINATOR_FLOOR",
]

DENOMINATOR_FLOOR = 0.5


class NkIterate:
    """Grid values ``w_k`` plus a memoized continuous extension ``eval_at``.

    ``evaluator`` maps an array of points to the iterate's values there.  The
    coarse and fine nodes are evaluated once on construction, so the cache is
    warm for everything the next step needs.
    """

    def __init__(self, k: int, grid_values: GridFunction, evaluator: Callable, asm: Assembly,
                 previous: Optional["NkIterate"] = None):
        self.k = k
        self.grid_values = grid_values
        self.previous = previous
        self._evaluator = evaluator
        self._cache: dict[float, float] = {}
        self._lock = threading.Lock()
        self.fine_values = self.eval_at(asm.tau)
        self.node_values = self.eval_at(asm.t)

    def eval_at(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        with self._lock:
            missing = np.array([x for x in dict.fromkeys(s_arr.tolist()) if x not in self._cache])
            if missing.size:
                self._cache.update(zip(missing.tolist(), np.asarray(self._evaluator(missing), dtype=float).tolist()))
            out = np.array([self._cache[x] for x in s_arr.tolist()])
        return float(out[0]) if np.ndim(s) == 0 else out.reshape(np.shape(s))

    __call__ = eval_at

    @property
    def min_denominator(self) -> Optional[float]:
        """Smallest interpolation denominator met so far; ``None`` without natural interpolation."""
        return getattr(self._evaluator, "min_denominator", None)


def _w(w_k) -> np.ndarray:
    return w_k.grid_values.values if isinstance(w_k, NkIterate) else np.asarray(w_k, dtype=float)


def nk_blocks(w_k: NkIterate, p: ProblemInstance, d: Discretization):
    """``(C, D_diag, b)`` of the grid system at the iterate ``w_k``."""
    asm = assembly(p, d)
    N, t, tau = p.nonlinearity, asm.t, asm.tau
    w = _w(w_k)
    v = w_k.fine_values
    phi_t = w_k.node_values
    C = asm.W * N.derivative(t[:, None], t[None, :], w[None, :])
    dN_fine = N.derivative(t[:, None], tau[None, :], v[None, :])
    I = asm.fq.integrate(dN_fine, N.derivative(t, t, phi_t), matrix=asm.G, line_integral=asm.f_t)
    D_diag = I - C.sum(axis=1)
    h = N(t[:, None], tau[None, :], v[None, :]) - w[:, None] * dN_fine
    h_diag = N(t, t, phi_t) - w * N.derivative(t, t, phi_t)
    b = (
        asm.y_t
        + asm.fq.integrate(h, h_diag, matrix=asm.G, line_integral=asm.f_t)
        + np.einsum("ij,ij->i", C, w[:, None] - w[None, :])
    )
    return C, D_diag, b


def assemble_nk_system(w_k: NkIterate, p: ProblemInstance, d: Discretization):
    """Matrix ``I - C - D`` and right-hand side ``b``."""
    C, D_diag, b = nk_blocks(w_k, p, d)
    M = -C
    M[np.diag_indices_from(M)] += 1.0 - D_diag
    return M, b


def _natural_formula(w_next, w_k: NkIterate, asm: Assembly, s):
    """Numerator/denominator evaluation of the natural interpolation at points ``s``."""
    N, t, tau = asm.problem.nonlinearity, asm.t, asm.tau
    w = _w(w_k)
    v = w_k.fine_values
    phi_s = w_k.eval_at(s)
    S = s[:, None]
    Cs = asm.weighted_kernel(s) * N.derivative(S, t[None, :], w[None, :])
    Q = Cs.sum(axis=1)
    G = asm.fq.kernel_matrix(s)
    f_s = asm.fq.line_integral(s)
    I = asm.fq.integrate(N.derivative(S, tau[None, :], v[None, :]), N.derivative(s, s, phi_s), matrix=G, line_integral=f_s)
    K = asm.fq.integrate(N(S, tau[None, :], v[None, :]), N(s, s, phi_s), matrix=G, line_integral=f_s)
    T_phi = np.einsum("ij,ij->i", Cs, w[None, :] - phi_s[:, None]) + phi_s * I
    z = K - T_phi + np.asarray(asm.problem.forcing(s), dtype=float)
    den = 1.0 - I + Q
    return (Cs @ np.asarray(w_next, dtype=float) + z) / den, den


def _guard(den, s, iteration):
    bad = np.abs(den) <= DENOMINATOR_FLOOR
    if np.any(bad):
        j = int(np.argmax(bad))
        raise InterpolationDegeneracyError(
            f"interpolation denominator {den[j]:.3e} at s={s[j]:.6g} is not above {DENOMINATOR_FLOOR}",
            s=float(s[j]),
            iteration=iteration,
        )


def natural_interpolate(w_next, w_k: NkIterate, p: ProblemInstance, d: Discretization, s):
    """Evaluate the next continuous iterate at ``s`` (scalar or array)."""
    asm = assembly(p, d)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr < p.a) or np.any(s_arr > p.b):
        raise ValueError(f"s must lie in [{p.a}, {p.b}]")
    vals, den = _natural_formula(w_next, w_k, asm, s_arr)
    _guard(den, s_arr, w_k.k + 1)
    return float(vals[0]) if np.ndim(s) == 0 else vals


class _NaturalExtension:
    """Callable ``s -> phi_next(s)`` that enforces the denominator guard and tracks its minimum."""

    def __init__(self, w_next, w_k: NkIterate, asm: Assembly):
        self.w_next, self.w_k, self.asm = w_next, w_k, asm
        self.min_denominator: Optional[float] = None

    def __call__(self, s):
        vals, den = _natural_formula(self.w_next, self.w_k, self.asm, s)
        _guard(den, s, self.w_k.k + 1)
        lo = float(np.min(den))
        self.min_denominator = lo if self.min_denominator is None else min(self.min_denominator, lo)
        return vals


def _next_iterate(w_next, w_k: NkIterate, asm: Assembly) -> NkIterate:
    grid = GridFunction(asm.t, w_next)
    if asm.disc.nk_interp == "linear":
        return NkIterate(w_k.k + 1, grid, grid, asm, previous=w_k)
    return NkIterate(w_k.k + 1, grid, _NaturalExtension(w_next, w_k, asm), asm, previous=w_k)


def _initial_iterate(phi0: Optional[Callable], asm: Assembly) -> NkIterate:
    if phi0 is None:
        def phi0(s):
            return np.zeros(np.shape(s))
    grid = GridFunction(asm.t, np.asarray(phi0(asm.t), dtype=float))
    return NkIterate(0, grid, lambda s: np.asarray(phi0(s), dtype=float), asm)


def solve_linearize_first(p: ProblemInstance, d: Discretization, phi0: Optional[Callable] = None):
    """Iterate from ``phi0`` (default: zero); returns ``(history, final iterate)``."""
    asm = assembly(p, d)
    it = _initial_iterate(phi0, asm)
    history = []
    while True:
        r = relative_residual_from_values(asm, it.node_values, it.fine_values)
        e = None if p.exact_solution is None else grid_relative_error(it.grid_values.values, p.exact_solution, d.rule)
        history.append(make_record(it.k, r, e, history[-1] if history else None))
        if stop_reason(history, d) is not None:
            return history, it
        M, rhs = assemble_nk_system(it, p, d)
        w_next = lu_solve(M, rhs, iteration=it.k + 1)
        it = _next_iterate(w_next, it, asm)
