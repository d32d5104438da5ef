"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a ``criterion N: PASS|FAIL`` line (also collected into the
pytest terminal summary).  Run directly with ``python tests/test_acceptance.py``
for the criterion lines alone.
"""

import math
import time

import numpy as np

from conftest import CRITERIA_LINES
from helpers import scalar_newton
from singsub import (
    FineQuadratureSpec,
    GridFunction,
    NkIterate,
    assemble_residual_Fn,
    exact_line_integral,
    fine_singular_integral,
    left_endpoint_rule,
    midpoint_rule,
    register_example,
    simpson_rule,
    solve_classical,
    solve_linearize_first,
    trapezoid_rule,
    verify_hypothesis_H,
)
from singsub.classical import jacobian, newton_blocks
from singsub.kernels import get_kernel
from singsub.linearize_first import nk_blocks
from singsub.problem import assembly


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA_LINES.append(line)
    print(line)
    assert ok, line


def fmt(values):
    return "(" + ", ".join(f"{v:.2f}" for v in values) + ")"


def within(actual, target, tol):
    return all(abs(a - b) <= tol for a, b in zip(actual, target)) and len(actual) == len(target)


def run(example, approach):
    problem, disc = register_example(example, approach)
    start = time.perf_counter()
    if approach == "classical":
        history = solve_classical(problem, disc)[0].history
    else:
        history = solve_linearize_first(problem, disc)[0]
    return history, time.perf_counter() - start


def log_rows(history, attr):
    return [math.log10(getattr(rec, attr)) for rec in history[1:6]]


def test_criterion_1_example2_linearize_first():
    history, seconds = run(2, "linearize-first")
    log_r, log_e = log_rows(history, "r"), log_rows(history, "e")
    target_r = (-0.2, -1.1, -2.7, -6.0, -12.0)
    target_e = tuple(math.log10(x) for x in (3e-1, 5e-2, 1e-3, 1e-6, 6e-13))
    ok = within(log_r, target_r, 0.3) and within(log_e, target_e, 0.3) and seconds < 5
    report(1, ok, f"log10 r={fmt(log_r)} log10 e={fmt(log_e)} in {seconds:.2f}s")


def test_criterion_2_example2_classical():
    history, seconds = run(2, "classical")
    log_r = log_rows(history, "r")
    ok = within(log_r, (-0.2, -1.0, -2.4, -2.7, -2.7), 0.3) and seconds < 60
    report(2, ok, f"log10 r={fmt(log_r)} in {seconds:.2f}s")


def test_criterion_3_example1_linearize_first():
    history, seconds = run(1, "linearize-first")
    log_r = log_rows(history, "r")
    ok = within(log_r, (-0.6, -2.9, -7.0, -8.0, -8.0), 0.5) and seconds < 60
    report(3, ok, f"log10 r={fmt(log_r)} target (-0.6, -2.9, -7.0, -8.0, -8.0) +-0.5, {seconds:.2f}s")


def test_criterion_4_example1_classical():
    history, seconds = run(1, "classical")
    log_r = log_rows(history, "r")
    ok = within(log_r, (-0.3, -1.6, -3.9, -4.2, -4.2), 0.5) and seconds < 60
    report(4, ok, f"log10 r={fmt(log_r)} target (-0.3, -1.6, -3.9, -4.2, -4.2) +-0.5, {seconds:.2f}s")


def test_criterion_5_scalar_newton_oracle():
    problem, disc = register_example(2, "linearize-first")
    _, final = solve_linearize_first(problem, disc)
    oracle = scalar_newton()
    gaps = {}
    it = final
    while it.k > 0:
        gaps[it.k] = float(np.max(np.abs(it.grid_values.values - oracle[it.k])))
        it = it.previous
    ok = sorted(gaps) == [1, 2, 3, 4, 5] and max(gaps.values()) <= 1e-8
    report(5, ok, f"max |w_k - c_k| = {max(gaps.values()):.1e}")


def test_criterion_6_jacobian_finite_differences():
    eps, worst = 1e-6, 0.0
    rng = np.random.default_rng(2024)
    for example in (1, 2):
        problem, disc = register_example(example, "classical", p=5, nodes="paper")
        for _ in range(10):
            x = rng.uniform(-0.5, 0.5, 5)
            J = jacobian(x, problem, disc)
            F = assemble_residual_Fn(x, problem, disc)
            for j in range(5):
                step = np.zeros(5)
                step[j] = eps
                fd = (assemble_residual_Fn(x + step, problem, disc) - F) / eps
                worst = max(worst, float(np.max(np.abs(fd - J[:, j]))))
    report(6, worst <= 1e-5, f"max componentwise gap {worst:.2e} (eps=1e-6)")


def test_criterion_7_C_equals_A():
    rng = np.random.default_rng(7)
    mismatches, checked = 0, 0
    for example in (1, 2):
        for approach in ("linearize-first", "classical"):
            problem, disc = register_example(example, approach)
            asm = assembly(problem, disc)
            for _ in range(100):
                x = rng.uniform(-8, 8, disc.rule.p)
                grid = GridFunction(asm.t, x)
                C = nk_blocks(NkIterate(0, grid, grid, asm), problem, disc)[0]
                A = newton_blocks(x, problem, disc)[0]
                mismatches += not np.array_equal(C, A)
                checked += 1
    report(7, mismatches == 0, f"{checked - mismatches}/{checked} bitwise-equal pairs")


def test_criterion_8_hypothesis_H():
    worst, total, all_pass = 0.0, 0, True
    for make in (midpoint_rule, left_endpoint_rule, trapezoid_rule, simpson_rule):
        for n in (51, 101, 201, 1001):
            rep = verify_hypothesis_H(make(0.0, 1.0, n), trials=100_000, seed=n)
            all_pass &= rep.passes and rep.gamma_hat == 2
            worst = max(worst, rep.max_ratio)
            total += rep.trials
    report(8, all_pass, f"max ratio {worst:.3f} <= 2 over {total} intervals")


def test_criterion_9_fine_rule_against_closed_form():
    kernel = get_kernel("example1")
    s = np.random.default_rng(9).uniform(0.0, 1.0, 20)
    exact = exact_line_integral(kernel, 0.0, 1.0, s)
    coarse = np.abs(fine_singular_integral(kernel, np.ones_like, FineQuadratureSpec(500, 2e-6), 0, 1, s) - exact)
    fine = np.abs(fine_singular_integral(kernel, np.ones_like, FineQuadratureSpec(2000, 2e-7), 0, 1, s) - exact)
    ok = coarse.max() <= 5e-3 and fine.max() < coarse.max()
    report(9, ok, f"max |diff| {coarse.max():.2e} at (500, 2e-6), {fine.max():.2e} at (2000, 2e-7); bound 5e-3")


def test_criterion_10_null_start_normalization():
    values = []
    for example in (1, 2):
        for approach in ("classical", "linearize-first"):
            problem, disc = register_example(example, approach, k_max=0)
            if approach == "classical":
                rec = solve_classical(problem, disc)[0].history[0]
            else:
                rec = solve_linearize_first(problem, disc)[0][0]
            values += [rec.r, rec.e]
    report(10, all(v == 1.0 for v in values), f"r, e at k=0: {values}")


if __name__ == "__main__":
    import sys

    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
