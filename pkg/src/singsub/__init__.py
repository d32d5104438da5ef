"""Singularity subtraction solvers for nonlinear weakly singular integral equations.

Two solvers are provided for ``phi(s) = int_a^b g(|s - t|) N(s, t, phi(t)) dt + y(s)``:
:func:`solve_classical` discretizes first and runs Newton on the grid system,
:func:`solve_linearize_first` runs Newton-Kantorovich and discretizes each
linear step.
"""

from .classical import ClassicalState, assemble_newton_system, assemble_residual_Fn, solve_classical
from .diagnostics import (
    IterationRecord,
    build_table,
    grid_relative_error,
    grid_relative_residual,
    plot_series,
    write_csv,
)
from .errors import (
    DivergenceError,
    InterpolationDegeneracyError,
    KernelDomainError,
    NoClosedFormError,
    SingsubError,
    SingularMatrixError,
    SolverError,
)
from .kernels import (
    Nonlinearity,
    SingularKernel,
    SymmetryClass,
    TruncatedKernel,
    eval_truncated,
    exact_line_integral,
    get_kernel,
    get_nonlinearity,
)
from .linalg import GridFunction, lu_solve, sup_norm
from .linearize_first import NkIterate, assemble_nk_system, natural_interpolate, solve_linearize_first
from .problem import Discretization, ForcingMode, ProblemInstance, get_problem, register_example, register_problem
from .quadrature import (
    FineQuadratureSpec,
    QuadratureRule,
    fine_singular_integral,
    left_endpoint_rule,
    midpoint_rule,
    simpson_rule,
    trapezoid_rule,
    verify_hypothesis_H,
)

__version__ = "0.1.0"
