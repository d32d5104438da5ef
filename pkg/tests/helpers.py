"""Small builders shared by several test modules."""

import numpy as np

from singsub import Discretization, FineQuadratureSpec, Nonlinearity, ProblemInstance, midpoint_rule
from singsub.kernels import LOG2, get_kernel
from singsub.problem import constant_function

Y2 = 0.5 + 0.25 * LOG2


def scalar_newton(k_max=20):
    """Newton iterates c_0 = 0, c_1, ... for -c - 2 log2 c^3 - y = 0."""
    c, out = 0.0, [0.0]
    for _ in range(k_max):
        F = -c - 2 * LOG2 * c**3 - Y2
        dF = -1 - 6 * LOG2 * c**2
        c = c - F / dF
        out.append(c)
    return out


def custom_problem(n_eval, dn_du, forcing=0.25, kernel="example1", p=20, **disc):
    """A problem on [0, 1] with the given factor N and constant forcing."""
    N = Nonlinearity(n_eval, dn_du, name="test")
    problem = ProblemInstance(0.0, 1.0, get_kernel(kernel), N, forcing=constant_function(forcing))
    settings = dict(rule=midpoint_rule(0, 1, p + 1), delta_n=1e-4, fine=FineQuadratureSpec(400, 1e-5))
    settings.update(disc)
    return problem, Discretization(**settings)


def zero_like(s, t, u):
    return np.zeros(np.broadcast_shapes(np.shape(s), np.shape(t), np.shape(u)))


def u_free(s, t, u):
    """A factor that does not depend on u."""
    return np.broadcast_to(np.asarray(s + t, dtype=float), np.broadcast_shapes(np.shape(s), np.shape(t), np.shape(u)))
