"""Weakly singular kernels ``g(|s - t|)``, their truncations and the nonlinear factor ``N``.

All callables here are vectorised: they accept scalars or numpy arrays and
broadcast like numpy ufuncs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import KernelDomainError, NoClosedFormError

__all__ = [
    "SymmetryClass",
    "SingularKernel",
    "TruncatedKernel",
    "Nonlinearity",
    "eval_truncated",
    "exact_line_integral",
    "register_kernel",
    "register_nonlinearity",
    "get_kernel",
    "get_nonlinearity",
]

LOG2 = float(np.log(2.0))


class SymmetryClass(enum.Enum):
    DECREASING = "3a"
    """Decreasing on the whole of ``(0, b - a]``."""
    SYMMETRIC_DECREASING = "3b"
    """Decreasing on ``(0, (b - a)/2]`` and symmetric about ``(b - a)/2``."""


@dataclass(frozen=True, eq=False)
class SingularKernel:
    """The weakly singular function ``g`` acting on distances ``r = |s - t|``.

    ``primitive`` is an antiderivative ``G`` with ``G' = g``. Some kernels have
    a closed-form line integral without a usable primitive; ``line_integral``
    then holds ``(a, b, s) -> int_a^b g(|s - t|) dt`` directly.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    symmetry: SymmetryClass
    interval_length: float
    primitive: Optional[Callable[[np.ndarray], np.ndarray]] = None
    line_integral: Optional[Callable[[float, float, np.ndarray], np.ndarray]] = None
    name: str = "custom"

    def __call__(self, r):
        return self.eval(r)

    @property
    def has_closed_form(self) -> bool:
        return self.primitive is not None or self.line_integral is not None

    @property
    def monotone_range(self) -> float:
        """Right end of the interval on which ``g`` is decreasing."""
        if self.symmetry is SymmetryClass.SYMMETRIC_DECREASING:
            return self.interval_length / 2.0
        return self.interval_length

    def truncate(self, delta: float) -> "TruncatedKernel":
        return TruncatedKernel(self, delta)


@dataclass(frozen=True, eq=False)
class TruncatedKernel:
    """``g`` with its singular neighbourhood flattened to the constant ``g(delta)``."""

    base: SingularKernel
    delta: float
    _g_delta: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"truncation width must be positive, got {self.delta}")
        if self.delta >= self.base.interval_length:
            raise ValueError("truncation width must be smaller than b - a")
        object.__setattr__(self, "_g_delta", float(self.base.eval(self.delta)))

    @property
    def ceiling(self) -> float:
        """The constant value ``g(delta)`` taken in the truncated zone."""
        return self._g_delta

    def __call__(self, r, check=True):
        return eval_truncated(self, r, check=check)


def eval_truncated(k: TruncatedKernel, r, check: bool = True):
    """Evaluate the ``delta``-truncated kernel at distances ``r`` in ``[0, b - a]``.

    The base kernel is only ever called at arguments ``>= delta``; ``g(0)`` is
    never formed.
    """
    r_arr = np.asarray(r, dtype=float)
    length = k.base.interval_length
    # tolerate round-off from |s - t| computed on [a, b]
    slack = 1e-12 * max(1.0, length)
    if check and (np.any(r_arr < -slack) or np.any(r_arr > length + slack)):
        raise KernelDomainError(f"kernel argument outside [0, {length}]")
    flat = r_arr <= k.delta
    if k.base.symmetry is SymmetryClass.SYMMETRIC_DECREASING:
        flat |= r_arr >= length - k.delta
    safe = np.where(flat, k.delta, r_arr)
    assert np.all(safe >= k.delta)
    out = np.where(flat, k.ceiling, k.base.eval(safe))
    if np.ndim(r) == 0:
        return float(out)
    return out


def exact_line_integral(k: SingularKernel, a: float, b: float, s):
    """Return ``f(s) = int_a^b g(|s - t|) dt`` in closed form.

    Uses ``G(s - a) + G(b - s) - 2 G(0)`` when a primitive is known.
    Raises :class:`NoClosedFormError` when neither form is available; callers
    then fall back to a fine quadrature.
    """
    s_arr = np.asarray(s, dtype=float)
    slack = 1e-12 * max(1.0, b - a)
    if np.any(s_arr < a - slack) or np.any(s_arr > b + slack):
        raise KernelDomainError(f"s must lie in [{a}, {b}]")
    s_arr = np.clip(s_arr, a, b)
    if k.primitive is not None:
        G = k.primitive
        out = G(s_arr - a) + G(b - s_arr) - 2.0 * G(np.zeros_like(s_arr))
    elif k.line_integral is not None:
        out = np.broadcast_to(k.line_integral(a, b, s_arr), s_arr.shape).astype(float)
    else:
        raise NoClosedFormError(f"kernel {k.name!r} has no closed-form line integral")
    if np.ndim(s) == 0:
        return float(out)
    return out


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """The factor ``N(s, t, u)`` and its partial derivative in ``u``."""

    n_eval: Callable
    dn_du: Callable
    name: str = "custom"

    def __call__(self, s, t, u):
        return self.n_eval(s, t, u)

    def derivative(self, s, t, u):
        return self.dn_du(s, t, u)


# -- built-in kernels and nonlinearities -------------------------------------


def _inv_sqrt(r):
    return 0.5 / np.sqrt(r)


def _log_cos(r):
    # log2 - log(1 - cos 2 pi r) rewritten via 1 - cos x = 2 sin^2(x/2); no cancellation near r = 0
    return -2.0 * np.log(np.sin(np.pi * np.asarray(r, dtype=float)))


def _two_log2(a, b, s):
    if (a, b) != (0.0, 1.0):
        raise NoClosedFormError("the log-cosine line integral is only known on [0, 1]")
    return np.full(np.shape(s), 2.0 * LOG2)


def _hammerstein_cos(s, t, u):
    return np.cos(2.0 * np.pi * u) / (1.0 + s + t + u**4)


def _hammerstein_cos_du(s, t, u):
    den = 1.0 + s + t + u**4
    two_pi_u = 2.0 * np.pi * u
    return (-2.0 * np.pi * np.sin(two_pi_u) * den - 4.0 * u**3 * np.cos(two_pi_u)) / den**2


def _cubic(s, t, u):
    u = np.asarray(u, dtype=float)
    return np.broadcast_to(u / LOG2 + u**3, np.broadcast_shapes(np.shape(s), np.shape(t), u.shape))


def _cubic_du(s, t, u):
    u = np.asarray(u, dtype=float)
    return np.broadcast_to(1.0 / LOG2 + 3.0 * u**2, np.broadcast_shapes(np.shape(s), np.shape(t), u.shape))


_KERNELS: dict[str, Callable[[], SingularKernel]] = {}
_NONLINEARITIES: dict[str, Callable[[], Nonlinearity]] = {}


def register_kernel(name: str, factory: Callable[[], SingularKernel]) -> None:
    _KERNELS[name] = factory


def register_nonlinearity(name: str, factory: Callable[[], Nonlinearity]) -> None:
    _NONLINEARITIES[name] = factory


def get_kernel(name: str) -> SingularKernel:
    try:
        return _KERNELS[name]()
    except KeyError:
        raise KeyError(f"unknown kernel {name!r}; known: {sorted(_KERNELS)}") from None


def get_nonlinearity(name: str) -> Nonlinearity:
    try:
        return _NONLINEARITIES[name]()
    except KeyError:
        raise KeyError(f"unknown nonlinearity {name!r}; known: {sorted(_NONLINEARITIES)}") from None


register_kernel(
    "example1",
    lambda: SingularKernel(
        eval=_inv_sqrt,
        primitive=np.sqrt,
        symmetry=SymmetryClass.DECREASING,
        interval_length=1.0,
        name="example1",
    ),
)
register_kernel(
    "example2",
    lambda: SingularKernel(
        eval=_log_cos,
        line_integral=_two_log2,
        symmetry=SymmetryClass.SYMMETRIC_DECREASING,
        interval_length=1.0,
        name="example2",
    ),
)
register_nonlinearity(
    "example1", lambda: Nonlinearity(_hammerstein_cos, _hammerstein_cos_du, name="example1")
)
register_nonlinearity("example2", lambda: Nonlinearity(_cubic, _cubic_du, name="example2"))
