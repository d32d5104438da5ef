"""Equation instances ``phi = K(phi) + y`` and their discretization parameters.

:func:`register_example` builds the two reference problems.  Custom problems
can be added with :func:`register_problem` and fetched by name.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import threading
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .kernels import LOG2, Nonlinearity, SingularKernel, TruncatedKernel, get_kernel, get_nonlinearity
from .quadrature import (
    FineQuadrature,
    FineQuadratureSpec,
    QuadratureRule,
    check_truncation_width,
    left_endpoint_rule,
    midpoint_rule,
)

__all__ = [
    "ForcingMode",
    "ProblemInstance",
    "Discretization",
    "ManufacturedForcing",
    "manufacture_forcing",
    "make_rule",
    "register_example",
    "register_problem",
    "get_problem",
    "Assembly",
    "assembly",
    "DEFAULT_NODE_COUNTS",
]


class ForcingMode(enum.Enum):
    CLOSED_FORM = "closed-form"
    MANUFACTURED = "manufactured"


def constant_function(c: float) -> Callable:
    def fn(s):
        return np.full(np.shape(s), c, dtype=float) if np.ndim(s) else float(c)

    fn.constant = float(c)
    return fn


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """One equation on ``[a, b]``: kernel ``g``, factor ``N``, forcing ``y`` and optionally ``phi``."""

    a: float
    b: float
    kernel: SingularKernel
    nonlinearity: Nonlinearity
    forcing: Optional[Callable]
    exact_solution: Optional[Callable] = None
    forcing_mode: ForcingMode = ForcingMode.CLOSED_FORM
    name: str = "custom"

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need a < b")
        if not np.isclose(self.kernel.interval_length, self.b - self.a):
            raise ValueError("kernel interval length must equal b - a")


@dataclass(frozen=True, eq=False)
class Discretization:
    """Everything that turns a :class:`ProblemInstance` into finite computations.

    ``line_integral`` selects how the classical scheme obtains ``f(t_i)``:
    ``"exact"`` uses the closed form, ``"fine"`` the plain fine sum.
    ``nk_interp`` picks the continuous extension of the linearize-first
    iterates (``"natural"`` or ``"linear"``).  The iteration stops at
    ``k_max``, when ``r <= residual_tol`` (off by default), or once ``|delta log10 r| <
    stall_eps`` for ``stall_patience`` consecutive steps.
    """

    rule: QuadratureRule
    delta_n: float
    fine: FineQuadratureSpec = FineQuadratureSpec()
    k_max: int = 5
    residual_tol: float = 0.0
    stall_eps: float = 0.05
    stall_patience: int = 2
    divergence_limit: float = 1e6
    line_integral: str = "exact"
    nk_interp: str = "natural"

    def __post_init__(self):
        if not self.delta_n > 0:
            raise ValueError("delta_n must be positive")
        if self.rule.p < 1:
            raise ValueError("the rule needs at least one node")
        if self.k_max < 0:
            raise ValueError("k_max must be >= 0")
        if self.line_integral not in ("exact", "fine"):
            raise ValueError(f"line_integral must be 'exact' or 'fine', got {self.line_integral!r}")
        if self.nk_interp not in ("natural", "linear"):
            raise ValueError(f"nk_interp must be 'natural' or 'linear', got {self.nk_interp!r}")
        if self.fine.mu > self.delta_n:
            warnings.warn("fine truncation mu exceeds delta_n", stacklevel=2)

    def replace(self, **changes) -> "Discretization":
        return dataclasses.replace(self, **changes)


class ManufacturedForcing:
    """``y(s) = phi(s) - K(phi)(s)`` with ``K`` applied by the plain fine rule.

    Values are memoized per ``s`` behind a lock, so repeated and concurrent
    evaluations at the same points return bit-identical numbers.
    """

    def __init__(self, problem: ProblemInstance, fine: FineQuadratureSpec):
        if problem.exact_solution is None:
            raise ValueError("manufacturing a forcing term needs an exact solution")
        self._phi = problem.exact_solution
        self._N = problem.nonlinearity
        self._fq = FineQuadrature(problem.kernel, fine, problem.a, problem.b)
        self._phi_tau = np.asarray(self._phi(self._fq.nodes), dtype=float)
        self._cache: dict[float, float] = {}
        self._lock = threading.Lock()

    def _compute(self, s):
        G = self._fq.kernel_matrix(s)
        K = np.einsum("il,il->i", G, self._N(s[:, None], self._fq.nodes[None, :], self._phi_tau[None, :]))
        return np.asarray(self._phi(s), dtype=float) - K

    def __call__(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        with self._lock:
            missing = np.array([x for x in dict.fromkeys(s_arr.tolist()) if x not in self._cache])
            if missing.size:
                self._cache.update(zip(missing.tolist(), self._compute(missing).tolist()))
            out = np.array([self._cache[x] for x in s_arr.tolist()])
        return float(out[0]) if np.ndim(s) == 0 else out.reshape(np.shape(s))


def manufacture_forcing(p: ProblemInstance, d: Discretization) -> ManufacturedForcing:
    return ManufacturedForcing(p, d.fine)


def make_rule(a: float, b: float, p: int, nodes: str = "midpoint") -> QuadratureRule:
    """Rectangle rule with ``p`` equal weights, at cell midpoints or left ends (``"paper"``)."""
    if nodes == "midpoint":
        return midpoint_rule(a, b, p + 1)
    if nodes in ("paper", "left"):
        return left_endpoint_rule(a, b, p + 1)
    raise ValueError(f"unknown node placement {nodes!r}")


# Default node counts per (example, approach).
DEFAULT_NODE_COUNTS = {
    (1, "classical"): 200,
    (1, "linearize-first"): 50,
    (2, "classical"): 1000,
    (2, "linearize-first"): 100,
}

_EXAMPLE_DELTA = {1: 2e-5, 2: 1e-6}
_EXAMPLE_FINE = {1: FineQuadratureSpec(500, 2e-6), 2: FineQuadratureSpec(500, 1e-6)}


def _example_problem(example_id: int) -> ProblemInstance:
    name = f"example{example_id}"
    kernel, nonlin = get_kernel(name), get_nonlinearity(name)
    if example_id == 1:
        return ProblemInstance(
            0.0, 1.0, kernel, nonlin, forcing=None, exact_solution=constant_function(7.0),
            forcing_mode=ForcingMode.MANUFACTURED, name=name,
        )
    return ProblemInstance(
        0.0, 1.0, kernel, nonlin, forcing=constant_function(0.5 + 0.25 * LOG2),
        exact_solution=constant_function(-0.5), forcing_mode=ForcingMode.CLOSED_FORM, name=name,
    )


def register_example(
    example_id: int,
    approach: str = "linearize-first",
    p: Optional[int] = None,
    nodes: str = "midpoint",
    **overrides,
) -> tuple[ProblemInstance, Discretization]:
    """Return the reference problem ``example_id`` (1 or 2) with its discretization.

    ``p`` defaults to ``DEFAULT_NODE_COUNTS[(example_id, approach)]``.
    Keyword ``overrides`` replace :class:`Discretization` fields, e.g.
    ``delta_n`` or ``fine``.
    """
    if example_id not in (1, 2):
        raise ValueError(f"unknown example id {example_id!r}; expected 1 or 2")
    if approach not in ("classical", "linearize-first"):
        raise ValueError(f"unknown approach {approach!r}")
    p = DEFAULT_NODE_COUNTS[(example_id, approach)] if p is None else int(p)
    problem = _example_problem(example_id)
    settings = dict(
        rule=make_rule(problem.a, problem.b, p, nodes),
        delta_n=_EXAMPLE_DELTA[example_id],
        fine=_EXAMPLE_FINE[example_id],
        line_integral="fine",
    )
    settings.update(overrides)
    disc = Discretization(**settings)
    check_truncation_width(disc.delta_n, disc.rule.mesh_h)
    if problem.forcing_mode is ForcingMode.MANUFACTURED:
        problem = dataclasses.replace(problem, forcing=manufacture_forcing(problem, disc))
    return problem, disc


_PROBLEMS: dict[str, Callable[..., tuple[ProblemInstance, Discretization]]] = {}


def register_problem(name: str, factory: Callable[..., tuple[ProblemInstance, Discretization]]) -> None:
    """Make ``factory(**kwargs) -> (problem, discretization)`` available as ``get_problem(name)``."""
    _PROBLEMS[name] = factory


def get_problem(name: str, **kwargs) -> tuple[ProblemInstance, Discretization]:
    try:
        factory = _PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {sorted(_PROBLEMS)}") from None
    return factory(**kwargs)


register_problem("example1", lambda **kw: register_example(1, **kw))
register_problem("example2", lambda **kw: register_example(2, **kw))


# -- shared geometry -------------------------------------------------------


class Assembly:
    """Problem-independent-of-iterate arrays shared by the solvers and diagnostics.

    ``W[i, j] = w_j g_delta(|t_i - t_j|)``; ``G`` is the fine kernel matrix
    from the coarse nodes to the fine nodes.  The fine-to-fine and
    fine-to-coarse blocks needed by the natural interpolation are built lazily.
    """

    def __init__(self, problem: ProblemInstance, disc: Discretization):
        self.problem, self.disc = problem, disc
        rule = disc.rule
        self.t, self.w = rule.nodes, rule.weights
        self.gd = TruncatedKernel(problem.kernel, disc.delta_n)
        self.W = self.weighted_kernel(self.t)
        self.row_sums = self.W.sum(axis=1)
        self.fq = FineQuadrature(problem.kernel, disc.fine, problem.a, problem.b)
        self.tau = self.fq.nodes
        self.G = self.fq.kernel_matrix(self.t)
        # f(t_i) for subtracted integrals: closed form when the kernel has one
        self.f_t = self.fq.line_integral(self.t)
        if disc.line_integral == "exact":
            self.f_classical = self.f_t
        else:
            self.f_classical = self.G.sum(axis=1)
        self.y_t = np.asarray(problem.forcing(self.t), dtype=float)
        self._lock = threading.Lock()
        self._fine = None

    def weighted_kernel(self, s) -> np.ndarray:
        """``w_j g_delta(|s_i - t_j|)`` for arbitrary points ``s_i``."""
        s = np.asarray(s, dtype=float)
        return self.w[None, :] * self.gd(np.abs(s[:, None] - self.t[None, :]))

    def fine_block(self):
        """``(W_tau, G_tau, f_tau, y_tau)``: the same quantities with fine nodes as targets."""
        with self._lock:
            if self._fine is None:
                self._fine = (
                    self.weighted_kernel(self.tau),
                    self.fq.kernel_matrix(self.tau),
                    self.fq.line_integral(self.tau),
                    np.asarray(self.problem.forcing(self.tau), dtype=float),
                )
            return self._fine


@functools.lru_cache(maxsize=16)
def assembly(problem: ProblemInstance, disc: Discretization) -> Assembly:
    """Cached :class:`Assembly`; both arguments hash by identity."""
    return Assembly(problem, disc)
