"""Reduced function f(n) over a range of final sizes, with its limits.

    python scripts/f_profile.py --out results/f_profile
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from epiident.csvio import write_rows
from epiident.errors import DomainError
from epiident.identifiability import proposition_check, reduced_f
from epiident.models import ModelKind


@dataclass
class Config:
    s_values: list[float] = field(default_factory=lambda: [0.02, 0.1, 0.3, 0.5, 0.7, 0.9])
    n_grid: np.ndarray = field(default_factory=lambda: np.geomspace(2.01, 500.0, 200))


def _f_or_nan(kind, n, s):
    try:
        return reduced_f(kind, n, s)
    except DomainError:
        return float("nan")


def run(cfg: Config, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for kind in (ModelKind.PAIRWISE_NM1, ModelKind.EBCM):
        columns = [[_f_or_nan(kind, n, s) for n in cfg.n_grid] for s in cfg.s_values]
        header = ["n"] + [f"s_inf={s:g}" for s in cfg.s_values]
        rows = zip(cfg.n_grid, *columns)
        with open(out / f"{kind.value}.csv", "w") as fh:
            write_rows(fh, header, rows)
    rep = proposition_check(cfg.s_values, cfg.n_grid)
    for s, inc, bnd in zip(rep.s_grid, rep.increasing, rep.bounded):
        print(f"pairwise s_inf={s:g}: increasing={bool(inc)} bounded={bool(bnd)}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/f_profile"))
    run(Config(), ap.parse_args().out)
