"""
Residual curves for several node counts
=======================================

Runs the classical solver on the first reference problem with p = 50, 100 and
200 nodes and writes the (k, log10 r) series of each run to CSV.  The same
data comes from the command line with

    singsub run --example 1 --approach classical --pn 50,100,200
"""

from pathlib import Path

from singsub import register_example, solve_classical
from singsub.diagnostics import plot_series, write_series_csv

out = Path("results")
out.mkdir(exist_ok=True)

for p in (50, 100, 200):
    problem, disc = register_example(1, "classical", p=p)
    state, _ = solve_classical(problem, disc)
    write_series_csv(state.history, out / f"example1_classical_p{p}_series.csv")
    series = ", ".join(f"{log_r:6.2f}" for _, log_r in plot_series(state.history))
    print(f"p = {p:4d}: log10 r = {series}")
