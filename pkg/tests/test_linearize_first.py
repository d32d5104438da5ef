import threading

import numpy as np
import pytest

from helpers import Y2, custom_problem, scalar_newton, u_free, zero_like
from singsub import (
    GridFunction,
    InterpolationDegeneracyError,
    NkIterate,
    assemble_nk_system,
    natural_interpolate,
    register_example,
    solve_linearize_first,
)
from singsub.classical import newton_blocks
from singsub.diagnostics import grid_relative_residual
from singsub.kernels import LOG2
from singsub.linearize_first import nk_blocks
from singsub.problem import assembly


def grid_iterate(values, problem, disc, k=0):
    asm = assembly(problem, disc)
    grid = GridFunction(asm.t, values)
    return NkIterate(k, grid, grid, asm)


@pytest.fixture(scope="module")
def ex2_run(example2_lf):
    problem, disc = example2_lf
    history, final = solve_linearize_first(problem, disc)
    return problem, disc, history, final


def iterates(final):
    chain = []
    while final is not None:
        chain.append(final)
        final = final.previous
    return chain[::-1]


def test_C_equals_A_on_shared_vector(example2_lf):
    problem, disc = example2_lf
    x = np.random.default_rng(0).uniform(-1, 1, disc.rule.p)
    C, _, _ = nk_blocks(grid_iterate(x, problem, disc), problem, disc)
    A, _, _ = newton_blocks(x, problem, disc)
    assert np.array_equal(C, A)


def test_D_for_constant_iterate_example2(example2_lf):
    problem, disc = example2_lf
    c = -0.3
    C, D, _ = nk_blocks(grid_iterate(np.full(disc.rule.p, c), problem, disc), problem, disc)
    expected = (1 / LOG2 + 3 * c**2) * 2 * LOG2 - C.sum(axis=1)
    assert np.allclose(D, expected, rtol=1e-13)
    assert np.ptp(D) < 1e-10


def test_derivative_free_factor_solves_in_one_step():
    problem, disc = custom_problem(u_free, zero_like)
    asm = assembly(problem, disc)
    it0 = grid_iterate(np.zeros(disc.rule.p), problem, disc)
    C, D, b = nk_blocks(it0, problem, disc)
    assert np.all(C == 0) and np.all(D == 0)
    integral = asm.fq.integrate(asm.t[:, None] + asm.tau[None, :], 2 * asm.t, matrix=asm.G, line_integral=asm.f_t)
    assert np.allclose(b, asm.y_t + integral, rtol=1e-14)
    history, final = solve_linearize_first(problem, disc)
    assert history[1].r < 1e-12
    s = np.linspace(0, 1, 11)
    z = 0.25 + asm.fq.integrate(s[:, None] + asm.tau[None, :], 2 * s, matrix=asm.fq.kernel_matrix(s),
                                line_integral=asm.fq.line_integral(s))
    assert np.allclose(final.eval_at(s), z, rtol=1e-13)


def test_interpolation_reproduces_grid_values(ex2_run, example1_lf):
    _, _, _, final = ex2_run
    for it in iterates(final)[1:]:
        assert np.max(np.abs(it.eval_at(it.grid_values.nodes) - it.grid_values.values)) < 1e-10
    problem, disc = example1_lf
    _, final1 = solve_linearize_first(problem, disc)
    for it in iterates(final1)[1:]:
        assert np.max(np.abs(it.node_values - it.grid_values.values)) < 1e-10


def test_natural_interpolate_matches_iterate(ex2_run):
    problem, disc, _, final = ex2_run
    prev = final.previous
    s = np.array([0.0, 0.123, 0.5, 1.0])
    assert np.allclose(natural_interpolate(final.grid_values.values, prev, problem, disc, s), final.eval_at(s))
    assert isinstance(natural_interpolate(final.grid_values.values, prev, problem, disc, 0.3), float)
    with pytest.raises(ValueError):
        natural_interpolate(final.grid_values.values, prev, problem, disc, 1.5)


def test_interpolant_constant_for_example2(ex2_run):
    _, _, _, final = ex2_run
    s = np.linspace(0, 1, 257)
    for it in iterates(final):
        assert np.ptp(it.eval_at(s)) < 1e-9


def test_scalar_newton_oracle(ex2_run):
    _, _, _, final = ex2_run
    oracle = scalar_newton()
    chain = iterates(final)
    assert np.allclose(chain[1].grid_values.values, -Y2, atol=1e-12)
    for it in chain[1:]:
        assert np.max(np.abs(it.grid_values.values - oracle[it.k])) <= 1e-8


def test_ratio_columns_bounded(ex2_run):
    _, _, history, _ = ex2_run
    for rec in history:
        assert 0.4 <= rec.e_over_r <= 2.5 and 0.4 <= rec.r_over_e <= 2.5


def test_superlinear_decrease(ex2_run):
    _, _, history, _ = ex2_run
    drops = [abs(rec.delta_log10_r) for rec in history[1:6]]
    assert all(a < b for a, b in zip(drops, drops[1:]))


def test_denominators_recorded_above_half(ex2_run):
    _, _, _, final = ex2_run
    for it in iterates(final)[1:]:
        assert it.min_denominator > 0.5
    assert iterates(final)[0].min_denominator is None


def test_degenerate_denominator_raises():
    problem, disc = register_example(2, p=4)
    with pytest.raises(InterpolationDegeneracyError) as info:
        solve_linearize_first(problem, disc, phi0=lambda s: np.full(np.shape(s), 1.0))
    assert 0 <= info.value.s <= 1 and info.value.iteration == 1


def test_linear_extension_option():
    problem, disc = register_example(2, nk_interp="linear")
    history, final = solve_linearize_first(problem, disc)
    assert np.max(np.abs(final.grid_values.values - scalar_newton()[5])) < 1e-8
    assert final.min_denominator is None


def test_eval_at_thread_safe(ex2_run):
    _, _, _, final = ex2_run
    s = np.random.default_rng(2).uniform(0, 1, 40)
    out = [None] * 6

    def work(i):
        out[i] = final.previous.eval_at(s)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(6)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(np.array_equal(out[0], o) for o in out)


def test_system_matrix_layout(example2_lf):
    problem, disc = example2_lf
    it = grid_iterate(np.full(disc.rule.p, 0.2), problem, disc)
    M, b = assemble_nk_system(it, problem, disc)
    C, D, b2 = nk_blocks(it, problem, disc)
    assert np.array_equal(b, b2)
    assert np.allclose(M, np.eye(disc.rule.p) - C - np.diag(D))


def test_example1_first_step_is_fixed_point_step(example1_lf):
    """dN/du vanishes at u = 0, so step one from zero returns y + K(0) exactly."""
    problem, disc = example1_lf
    history, final = solve_linearize_first(problem, disc.replace(k_max=1))
    asm = assembly(problem, disc)
    N = problem.nonlinearity
    K0 = asm.fq.integrate(N(asm.t[:, None], asm.tau[None, :], 0.0), N(asm.t, asm.t, 0.0),
                          matrix=asm.G, line_integral=asm.f_t)
    assert np.allclose(final.grid_values.values, asm.y_t + K0, rtol=1e-13)


def test_example1_first_error_against_independent_quadrature(example1_lf):
    """e_1 computed with scipy's adaptive quadrature agrees with the solver and sits near 0.11."""
    from scipy.integrate import quad

    problem, disc = example1_lf
    history, _ = solve_linearize_first(problem, disc.replace(k_max=1))
    N, g = problem.nonlinearity, problem.kernel

    def K(s, u):
        def integrand(t):
            return g(abs(s - t)) * N(s, t, u)
        parts = [(0, s), (s, 1)]
        return sum(quad(integrand, lo, hi, limit=200)[0] for lo, hi in parts if hi > lo)

    worst = 0.0
    for s in disc.rule.nodes:
        phi1 = 7.0 - K(s, 7.0) + K(s, 0.0)  # y + K(0) with y = 7 - K(7)
        worst = max(worst, abs(phi1 - 7.0) / 7.0)
    assert history[1].e == pytest.approx(worst, rel=0.05)
    assert 0.08 < worst < 0.15
