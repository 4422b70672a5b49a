"""Eigenvalue and final-size curves tau(n) for a family of masters.

    python scripts/curve_families.py --out results/curves
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from epiident.csvio import write_rows
from epiident.errors import NoIntersectionError
from epiident.identifiability import curve_pair, solve_intersection
from epiident.models import ModelKind
from epiident.observables import compute_observables


@dataclass
class Family:
    kind: ModelKind
    gamma: float
    n: float
    taus: list[float]


@dataclass
class Config:
    families: list[Family] = field(default_factory=lambda: [
        Family(ModelKind.EBCM, 1 / 7, 6.0, [0.03, 0.045, 0.07]),
        Family(ModelKind.PAIRWISE_NM1, 1.0, 6.0, [0.26, 0.33, 0.47]),
    ])
    n_grid: np.ndarray = field(default_factory=lambda: np.linspace(2.5, 20.0, 176))


def run(cfg: Config, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for fam in cfg.families:
        for tau in fam.taus:
            obs = compute_observables(fam.kind, tau, fam.gamma, fam.n)
            pair = curve_pair(fam.kind, obs.lam, obs.s_inf, fam.gamma, cfg.n_grid)
            try:
                n_star, tau_star = solve_intersection(fam.kind, obs.lam, obs.s_inf, fam.gamma)
                note = f"n_star={n_star!r}, tau_star={tau_star!r}"
            except NoIntersectionError:
                note = "no_intersection"
            name = f"{fam.kind.value}_tau{tau:g}.csv"
            with open(out / name, "w") as fh:
                write_rows(fh, ["n", "tau_eigenvalue", "tau_finalsize"],
                           zip(pair.n_grid, pair.tau_lambda, pair.tau_s),
                           [f"lambda={obs.lam!r}, s_inf={obs.s_inf!r}, gamma={fam.gamma!r}", note])
            print(f"{name}: s_inf={obs.s_inf:.4f} {note}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/curves"))
    run(Config(), ap.parse_args().out)
