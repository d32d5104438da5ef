"""Stopping rule shared by both solvers."""

from __future__ import annotations

import math
from typing import Optional, Sequence

from .diagnostics import IterationRecord
from .errors import DivergenceError
from .problem import Discretization


def stop_reason(history: Sequence[IterationRecord], disc: Discretization) -> Optional[str]:
    """Why the iteration should stop after the last record, or ``None`` to continue."""
    last = history[-1]
    if not math.isfinite(last.r) or last.r > disc.divergence_limit:
        raise DivergenceError(f"relative residual {last.r:.3e} exceeds {disc.divergence_limit:g}", iteration=last.k)
    if last.k >= disc.k_max:
        return "k_max"
    if last.r <= disc.residual_tol:
        return "converged"
    recent = [rec.delta_log10_r for rec in history[1:]][-disc.stall_patience:]
    if len(recent) == disc.stall_patience and all(abs(dl) < disc.stall_eps for dl in recent):
        return "stalled"
    return None
