"""Command-line experiment runner.

    singsub run --example 2 --approach linearize-first
    singsub run --example 1 --approach classical --pn 50,100,200 --out results

Settings may also come from an INI file (``--config``) with a ``[run]``
section whose keys mirror the long flag names (``fine-p`` or ``fine_p``).
Flags given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .classical import solve_classical
from .diagnostics import build_table, write_csv, write_series_csv
from .errors import SolverError
from .linearize_first import solve_linearize_first
from .problem import DEFAULT_NODE_COUNTS, get_problem
from .quadrature import FineQuadratureSpec

APPROACHES = ("classical", "linearize-first")


@dataclass(frozen=True)
class RunConfig:
    example: int = 2
    approaches: tuple = APPROACHES
    pn: Optional[tuple] = None
    delta: Optional[float] = None
    fine_p: Optional[int] = None
    fine_mu: Optional[float] = None
    kmax: int = 5
    nodes: str = "midpoint"
    out: Path = Path("results")
    problem: Optional[str] = None

    def __post_init__(self):
        if not self.approaches:
            raise ValueError("at least one approach is required")
        if self.pn is not None and any(p < 1 for p in self.pn):
            raise ValueError("node counts must be positive")
        for name in ("delta", "fine_mu"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive")
        if self.fine_p is not None and self.fine_p < 1:
            raise ValueError("fine-p must be positive")
        if self.kmax < 0:
            raise ValueError("kmax must be >= 0")

    @property
    def label(self) -> str:
        return self.problem or f"example{self.example}"


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="singsub", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="solve one example with one or both approaches")
    run.add_argument("--example", type=int, choices=(1, 2))
    run.add_argument("--problem", help="name of a problem added with register_problem")
    run.add_argument("--approach", choices=APPROACHES + ("both",))
    run.add_argument("--pn", type=_int_list, help="comma-separated node counts, e.g. 50,100,200")
    run.add_argument("--delta", type=float, help="truncation width delta_n")
    run.add_argument("--fine-p", type=int, help="number of fine quadrature nodes")
    run.add_argument("--fine-mu", type=float, help="truncation width of the fine rule")
    run.add_argument("--kmax", type=int, help="maximum number of Newton steps")
    run.add_argument("--nodes", choices=("paper", "midpoint"), help="left-endpoint or midpoint nodes")
    run.add_argument("--out", type=Path, help="output directory (default: results)")
    run.add_argument("--config", type=Path, help="INI file with a [run] section")
    return parser


_CONVERTERS = {
    "example": int,
    "problem": str,
    "approach": str,
    "pn": _int_list,
    "delta": float,
    "fine_p": int,
    "fine_mu": float,
    "kmax": int,
    "nodes": str,
    "out": Path,
}


def _read_config(path: Path) -> dict:
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise ValueError(f"cannot read config file {path}")
    if not parser.has_section("run"):
        raise ValueError(f"{path}: missing [run] section")
    values = {}
    for key, raw in parser.items("run"):
        name = key.replace("-", "_")
        if name not in _CONVERTERS:
            raise ValueError(f"{path}: unknown key {key!r}")
        values[name] = _CONVERTERS[name](raw)
    return values


def config_from_args(args: argparse.Namespace) -> RunConfig:
    merged = _read_config(args.config) if args.config else {}
    merged.update({k: v for k, v in vars(args).items() if k in _CONVERTERS and v is not None})
    approach = merged.pop("approach", "both")
    if approach not in APPROACHES + ("both",):
        raise ValueError(f"unknown approach {approach!r}")
    merged["approaches"] = APPROACHES if approach == "both" else (approach,)
    if merged.get("nodes", "midpoint") not in ("paper", "midpoint"):
        raise ValueError(f"unknown node placement {merged['nodes']!r}")
    return RunConfig(**merged)


def _setup(cfg: RunConfig, approach: str, p: Optional[int]):
    overrides = {"k_max": cfg.kmax}
    if cfg.delta is not None:
        overrides["delta_n"] = cfg.delta
    base_p, base_d = get_problem(cfg.label, approach=approach, p=p, nodes=cfg.nodes, **overrides)
    if cfg.fine_p is None and cfg.fine_mu is None:
        return base_p, base_d
    fine = FineQuadratureSpec(
        big_p=cfg.fine_p if cfg.fine_p is not None else base_d.fine.big_p,
        mu=cfg.fine_mu if cfg.fine_mu is not None else base_d.fine.mu,
    )
    # rebuild so a manufactured forcing term uses the same fine rule
    return get_problem(cfg.label, approach=approach, p=p, nodes=cfg.nodes, fine=fine, **overrides)


def run(cfg: RunConfig, stream=None) -> int:
    """Solve every (approach, p) pair, write CSVs and print tables; returns the exit status."""
    stream = stream or sys.stdout
    cfg.out.mkdir(parents=True, exist_ok=True)
    status = 0
    for approach in cfg.approaches:
        counts = cfg.pn or (DEFAULT_NODE_COUNTS.get((cfg.example, approach)) if cfg.problem is None else None,)
        for p in counts:
            problem, disc = _setup(cfg, approach, p)
            try:
                if approach == "classical":
                    history = solve_classical(problem, disc)[0].history
                else:
                    history = solve_linearize_first(problem, disc)[0]
            except SolverError as exc:
                print(f"error: {cfg.label} {approach} p={disc.rule.p}: {exc}", file=sys.stderr)
                status = 1
                continue
            stem = cfg.out / f"{cfg.label}_{approach}_p{disc.rule.p}"
            write_csv(history, stem.with_suffix(".csv"))
            write_series_csv(history, stem.parent / (stem.name + "_series.csv"))
            print(f"{cfg.label}, {approach}, p = {disc.rule.p}", file=stream)
            print(build_table(history), file=stream)
            print(file=stream)
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, KeyError) as exc:
        parser.error(str(exc))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
