"""Relative residual and error of approximate solutions, and convergence tables.

Both quantities are grid valued: sup norms are taken over the solver's own
nodes.  ``r = |F(phi_hat)| / |F(0)|`` with ``F(x) = x - K(x) - y`` and ``K``
applied by the fine rule; ``e = |phi_hat - phi| / |phi|``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .linalg import sup_norm
from .problem import Assembly, Discretization, ProblemInstance, assembly
from .quadrature import QuadratureRule

__all__ = [
    "IterationRecord",
    "make_record",
    "residual_on_grid",
    "grid_relative_residual",
    "relative_residual_from_values",
    "grid_relative_error",
    "build_table",
    "plot_series",
    "write_csv",
    "write_series_csv",
    "CSV_HEADER",
]

CSV_HEADER = ("k", "r", "log10_r", "delta_log10_r", "e", "e_over_r", "r_over_e")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    r: float
    log10_r: float
    delta_log10_r: Optional[float] = None
    e: Optional[float] = None
    e_over_r: Optional[float] = None
    r_over_e: Optional[float] = None


def _log10(x: float) -> float:
    return math.log10(x) if x > 0 else -math.inf


def make_record(k: int, r: float, e: Optional[float] = None, previous: Optional[IterationRecord] = None):
    log_r = _log10(r)
    delta = None if previous is None else log_r - previous.log10_r
    e_over_r = r_over_e = None
    if e is not None and e > 0 and r > 0:
        e_over_r, r_over_e = e / r, r / e
    return IterationRecord(k, float(r), log_r, delta, None if e is None else float(e), e_over_r, r_over_e)


def residual_on_grid(asm: Assembly, grid_values, fine_values) -> np.ndarray:
    """``F(phi_hat)(t_i)`` from the candidate's values at the coarse and fine nodes."""
    N = asm.problem.nonlinearity
    t, tau = asm.t, asm.tau
    x = np.asarray(grid_values, dtype=float)
    v = np.asarray(fine_values, dtype=float)
    K = asm.fq.integrate(
        N(t[:, None], tau[None, :], v[None, :]),
        N(t, t, x),
        matrix=asm.G,
        line_integral=asm.f_t,
    )
    return x - K - asm.y_t


def _f0_norm(asm: Assembly) -> float:
    cached = getattr(asm, "_f0_norm", None)
    if cached is None:
        cached = sup_norm(residual_on_grid(asm, np.zeros_like(asm.t), np.zeros_like(asm.tau)))
        if cached == 0.0:
            raise ZeroDivisionError("|F(0)| vanishes on the grid; the relative residual is undefined")
        asm._f0_norm = cached
    return cached


def relative_residual_from_values(asm: Assembly, grid_values, fine_values) -> float:
    return sup_norm(residual_on_grid(asm, grid_values, fine_values)) / _f0_norm(asm)


def grid_relative_residual(candidate: Callable, p: ProblemInstance, d: Discretization) -> float:
    """``r`` for a candidate ``s -> phi_hat(s)`` evaluable on arrays."""
    asm = assembly(p, d)
    return relative_residual_from_values(asm, candidate(asm.t), candidate(asm.tau))


def grid_relative_error(candidate, exact: Callable, rule: QuadratureRule) -> float:
    """``e`` over the rule's nodes; ``candidate`` is a callable or an array of node values."""
    phi = np.asarray(exact(rule.nodes), dtype=float)
    norm = sup_norm(phi)
    if norm == 0.0:
        raise ZeroDivisionError("the exact solution vanishes on the grid")
    vals = candidate(rule.nodes) if callable(candidate) else candidate
    return sup_norm(np.asarray(vals, dtype=float) - phi) / norm


# -- presentation ----------------------------------------------------------


def _sci(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.0e}"


def _fix(x: Optional[float], digits: int = 1) -> str:
    if x is None:
        return ""
    if abs(x) >= 1000:
        return f"{x:.0f}"
    if x != 0 and abs(x) < 0.05:
        return f"{x:.1g}"
    return f"{x:.{digits}f}"


def build_table(records: Sequence[IterationRecord]) -> str:
    """Plain-text table with columns ``k, r, log10 r, dlog10 r, e, e/r, r/e``."""
    if not records:
        return ""
    head = ("k", "r", "log10 r", "dlog10 r", "e", "e/r", "r/e")
    rows = [
        (str(rec.k), _sci(rec.r), _fix(rec.log10_r), _fix(rec.delta_log10_r), _sci(rec.e),
         _fix(rec.e_over_r), _fix(rec.r_over_e))
        for rec in records
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(head)]
    lines = ["  ".join(h.rjust(wd) for h, wd in zip(head, widths))]
    lines.append("  ".join("-" * wd for wd in widths))
    lines += ["  ".join(c.rjust(wd) for c, wd in zip(row, widths)) for row in rows]
    return "\n".join(lines)


def plot_series(records: Iterable[IterationRecord]) -> list[tuple[int, float]]:
    return [(rec.k, rec.log10_r) for rec in records]


def _csv_value(x) -> str:
    return "NA" if x is None else repr(x)


def write_csv(records: Iterable[IterationRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(CSV_HEADER)
        for rec in records:
            out.writerow([rec.k] + [_csv_value(getattr(rec, name)) for name in CSV_HEADER[1:]])


def write_series_csv(records: Iterable[IterationRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(("k", "log10_r"))
        for k, log_r in plot_series(records):
            out.writerow((k, repr(log_r)))
