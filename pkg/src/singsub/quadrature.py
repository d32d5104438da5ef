"""Composite quadrature rules on ``[a, b]`` and the fine rule for singular integrals.

Two kinds of rule live here.  The coarse rules (:func:`midpoint_rule` and
friends) define the scheme's nodes and weights.  :class:`FineQuadrature` is an
auxiliary truncated midpoint rule with many more nodes, used wherever the
scheme needs an integral much more accurately than the coarse rule delivers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NoClosedFormError
from .kernels import SingularKernel, TruncatedKernel, exact_line_integral

__all__ = [
    "QuadratureRule",
    "midpoint_rule",
    "left_endpoint_rule",
    "trapezoid_rule",
    "simpson_rule",
    "HReport",
    "interval_weight",
    "verify_hypothesis_H",
    "FineQuadratureSpec",
    "FineQuadrature",
    "fine_singular_integral",
    "check_truncation_width",
]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes ``t_j`` and positive weights ``w_j`` of a composite rule on ``[a, b]``.

    ``mesh_h`` is the largest subinterval of the basic grid the rule was built
    on, and ``gamma_hat`` the constant for which the weight-density bound
    (see :func:`verify_hypothesis_H`) holds.
    """

    a: float
    b: float
    nodes: np.ndarray
    weights: np.ndarray
    gamma_hat: float
    mesh_h: float
    kind: str = "custom"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ValueError("nodes and weights must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if nodes[0] < self.a or nodes[-1] > self.b:
            raise ValueError("nodes must lie in [a, b]")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def p(self) -> int:
        return self.nodes.size

    def __call__(self, fn: Callable) -> float:
        return float(np.dot(self.weights, fn(self.nodes)))


def _check_n(n):
    if int(n) != n or n < 2:
        raise ValueError(f"the basic grid needs n >= 2 points, got {n}")
    return int(n)


def midpoint_rule(a: float, b: float, n: int) -> QuadratureRule:
    """Composite midpoint rule on the uniform ``n``-point basic grid (``p = n - 1`` nodes)."""
    n = _check_n(n)
    h = (b - a) / (n - 1)
    nodes = a + (np.arange(n - 1) + 0.5) * h
    return QuadratureRule(a, b, nodes, np.full(n - 1, h), gamma_hat=2.0, mesh_h=h, kind="midpoint")


def left_endpoint_rule(a: float, b: float, n: int) -> QuadratureRule:
    """Composite left-rectangle rule: nodes ``a + (j - 1) h``, ``j = 1..n-1``."""
    n = _check_n(n)
    h = (b - a) / (n - 1)
    nodes = a + np.arange(n - 1) * h
    return QuadratureRule(a, b, nodes, np.full(n - 1, h), gamma_hat=2.0, mesh_h=h, kind="left")


def trapezoid_rule(a: float, b: float, n: int) -> QuadratureRule:
    n = _check_n(n)
    h = (b - a) / (n - 1)
    nodes = np.linspace(a, b, n)
    weights = np.full(n, h)
    weights[[0, -1]] = h / 2
    return QuadratureRule(a, b, nodes, weights, gamma_hat=2.0, mesh_h=h, kind="trapezoid")


def simpson_rule(a: float, b: float, n: int) -> QuadratureRule:
    """Composite Simpson rule: basic grid points plus subinterval midpoints (``2n - 1`` nodes)."""
    n = _check_n(n)
    h = (b - a) / (n - 1)
    nodes = np.linspace(a, b, 2 * n - 1)
    weights = np.empty(2 * n - 1)
    weights[1::2] = 4 * h / 6
    weights[2:-1:2] = 2 * h / 6
    weights[[0, -1]] = h / 6
    return QuadratureRule(a, b, nodes, weights, gamma_hat=2.0, mesh_h=h, kind="simpson")


# -- weight-density hypothesis ---------------------------------------------


@dataclass(frozen=True)
class HReport:
    max_ratio: float
    passes: bool
    gamma_hat: float
    worst_interval: tuple
    trials: int
    min_length: float


def _cumulative(rule):
    return np.concatenate(([0.0], np.cumsum(rule.weights)))


def interval_weight(rule: QuadratureRule, c, d, closed: str = "right"):
    """Sum of the weights whose nodes fall in ``]c, d]`` (``closed="right"``) or ``[c, d[``."""
    side = {"right": "right", "left": "left"}[closed]
    cum = _cumulative(rule)
    hi = np.searchsorted(rule.nodes, d, side=side)
    lo = np.searchsorted(rule.nodes, c, side=side)
    return cum[hi] - cum[lo]


def verify_hypothesis_H(
    rule: QuadratureRule,
    trials: int,
    seed: int = 0,
    min_length: Optional[float] = None,
) -> HReport:
    """Check ``sum_{t_j in J} w_j <= gamma_hat (d - c)`` over half-open intervals ``J``.

    A single node in an interval much shorter than its weight violates any such
    bound, so intervals are restricted to ``d - c >= min_length`` (default: the
    rule's mesh size).  ``trials`` random intervals are drawn from a seeded
    generator and checked in both ``]c, d]`` and ``[c, d[`` form, together with
    deterministic intervals of exactly ``min_length`` anchored at every node.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    a, b = rule.a, rule.b
    L = rule.mesh_h if min_length is None else float(min_length)
    L = min(L, b - a)
    rng = np.random.default_rng(seed)
    c = rng.uniform(a, b - L, trials)
    d = c + L + rng.uniform(0.0, 1.0, trials) * (b - c - L)

    t = rule.nodes
    adv_c = np.concatenate([t, np.maximum(t - L, a), t[:-1]])
    adv_d = np.concatenate([np.minimum(t + L, b), np.maximum(t - L, a) + L, t[1:]])
    keep = adv_d - adv_c >= L * (1 - 1e-12)
    c = np.concatenate([c, adv_c[keep]])
    d = np.concatenate([d, adv_d[keep]])

    best, where = 0.0, (a, b)
    for closed in ("right", "left"):
        ratio = interval_weight(rule, c, d, closed) / (d - c)
        i = int(np.argmax(ratio))
        if ratio[i] > best:
            best, where = float(ratio[i]), (float(c[i]), float(d[i]), closed)
    return HReport(
        max_ratio=best,
        passes=best <= rule.gamma_hat * (1 + 1e-12),
        gamma_hat=rule.gamma_hat,
        worst_interval=where,
        trials=int(c.size),
        min_length=L,
    )


def check_truncation_width(delta: float, h: float, alpha1: float = 1e-6, beta1: float = 1.0) -> bool:
    """Warn when ``alpha1 h <= delta <= beta1 h`` fails; returns whether it holds."""
    ok = alpha1 * h <= delta <= beta1 * h
    if not ok:
        warnings.warn(
            f"truncation width {delta:g} is outside [{alpha1 * h:g}, {beta1 * h:g}] for mesh size {h:g}",
            stacklevel=2,
        )
    return ok


# -- fine quadrature -------------------------------------------------------


@dataclass(frozen=True)
class FineQuadratureSpec:
    """Parameters of the fine rule: ``big_p`` midpoint nodes and kernel truncation ``mu``.

    With ``subtract=True`` integrals ``int g(|s-t|) h(t) dt`` are computed as
    ``sum rho g_mu(|s-tau|) (h(tau) - h(s)) + h(s) f(s)``, where ``f`` is the
    kernel's closed-form line integral.  This makes the rule exact on
    constants.  With ``subtract=False`` the plain truncated sum is used.
    """

    big_p: int = 500
    mu: float = 2e-6
    rule_kind: str = "midpoint"
    subtract: bool = True

    def __post_init__(self):
        if self.big_p < 1:
            raise ValueError("big_p must be positive")
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.rule_kind != "midpoint":
            raise ValueError(f"unsupported fine rule {self.rule_kind!r}")


def fine_singular_integral(
    k: SingularKernel,
    weight_fn: Callable,
    spec: FineQuadratureSpec,
    a: float,
    b: float,
    s,
):
    """Plain truncated midpoint sum ``sum_l rho_l g_mu(|s - tau_l|) weight_fn(tau_l)``."""
    fq = FineQuadrature(k, spec, a, b)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    out = fq.kernel_matrix(s_arr) @ np.asarray(weight_fn(fq.nodes), dtype=float)
    return float(out[0]) if np.ndim(s) == 0 else out


class FineQuadrature:
    """Vectorised fine rule bound to a kernel and an interval.

    ``integrate`` works on whole batches of target points: ``values[i, l]`` is
    the integrand for target ``s_i`` at node ``tau_l``.
    """

    def __init__(self, kernel: SingularKernel, spec: FineQuadratureSpec, a: float, b: float):
        self.kernel = kernel
        self.spec = spec
        self.a, self.b = float(a), float(b)
        P = spec.big_p
        self.rho = (self.b - self.a) / P
        self.nodes = self.a + (np.arange(P) + 0.5) * self.rho
        self.truncated = TruncatedKernel(kernel, spec.mu)

    def kernel_matrix(self, targets) -> np.ndarray:
        """``rho * g_mu(|s_i - tau_l|)`` for every target ``s_i``."""
        s = np.asarray(targets, dtype=float)
        return self.rho * self.truncated(np.abs(s[:, None] - self.nodes[None, :]))

    def line_integral(self, targets) -> np.ndarray:
        """``int_a^b g(|s - t|) dt``, exactly when possible, else by the plain fine sum."""
        s = np.asarray(targets, dtype=float)
        try:
            return np.asarray(exact_line_integral(self.kernel, self.a, self.b, s), dtype=float)
        except NoClosedFormError:
            return self.kernel_matrix(s).sum(axis=1)

    def plain_line_integral(self, targets) -> np.ndarray:
        return self.kernel_matrix(targets).sum(axis=1)

    def integrate(self, values, at_targets=None, *, matrix, line_integral=None, subtract=None):
        """Integrate ``values[i, :]`` against ``g(|s_i - .|)``.

        ``matrix`` is the precomputed :meth:`kernel_matrix` for the targets.
        For the subtracted form ``at_targets[i]`` is the integrand at
        ``t = s_i`` and ``line_integral`` the matching ``f(s_i)``.
        """
        subtract = self.spec.subtract if subtract is None else subtract
        values = np.asarray(values, dtype=float)
        if not subtract:
            return np.einsum("il,il->i", matrix, values)
        if at_targets is None or line_integral is None:
            raise ValueError("the subtracted form needs the integrand at the targets and f(s)")
        at_targets = np.asarray(at_targets, dtype=float)
        return np.einsum("il,il->i", matrix, values - at_targets[:, None]) + at_targets * line_integral
