"""Distance between daily-incidence curves over a (tau, n) window."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidParameterError, NumericalError
from .integrator import IncidenceSeries, daily_incidence, integrate, integrate_many
from .models import EpidemicParams, ModelKind
from .observables import tau_on_finalsize_curve

__all__ = [
    "DistanceSurface",
    "ValleyProfile",
    "trajectory_distance",
    "incidence_of",
    "left_open_grid",
    "distance_surface",
    "distance_surface_on_grid",
    "valley_profile",
    "strict_local_minima",
]

THREADS_ENV = "EPIIDENT_THREADS"


def trajectory_distance(a, b, N: float) -> float:
    """Euclidean distance between two incidence series, scaled by N."""
    a = a.new_cases if isinstance(a, IncidenceSeries) else np.asarray(a, dtype=float)
    b = b.new_cases if isinstance(b, IncidenceSeries) else np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise InvalidParameterError(f"incidence series lengths differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b) / N)


def incidence_of(params: EpidemicParams, horizon_days: int, rel_tol: float = 1e-8, abs_tol: float = 1e-8) -> IncidenceSeries:
    traj = integrate(params.kind, params, float(horizon_days), 1.0, rel_tol, abs_tol)
    return daily_incidence(traj)


def left_open_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """``count`` equally spaced points on (lo, hi]."""
    if count < 1 or not hi > lo:
        raise InvalidParameterError("grid needs count >= 1 and hi > lo")
    return lo + (hi - lo) * np.arange(1, count + 1) / count


@dataclass(frozen=True)
class DistanceSurface:
    tau_grid: np.ndarray
    n_grid: np.ndarray
    D: np.ndarray  # shape (len(tau_grid), len(n_grid)); NaN where integration failed
    master: EpidemicParams
    horizon: int

    @property
    def max(self) -> float:
        return float(np.nanmax(self.D))


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise InvalidParameterError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if value < 1:
            raise InvalidParameterError(f"{THREADS_ENV} must be >= 1")
        return value
    return min(8, os.cpu_count() or 1)


def _column(master: EpidemicParams, taus: np.ndarray, n: float, horizon: int, rtol: float, atol: float) -> np.ndarray:
    """Incidence vectors (horizon, len(taus)) for one degree; NaN columns on failure."""
    I0 = master.N - master.init.S0 if master.kind is not ModelKind.EBCM else master.N * (1 - master.init.phiS0)
    try:
        _, C = integrate_many(master.kind, taus, n, master.gamma, master.N, I0, float(horizon), 1.0, rtol, atol)
        return np.diff(C, axis=0)
    except NumericalError:
        pass
    out = np.full((horizon, len(taus)), np.nan)
    for i, tau in enumerate(taus):
        try:
            _, C = integrate_many(master.kind, [tau], n, master.gamma, master.N, I0, float(horizon), 1.0, rtol, atol)
            out[:, i] = np.diff(C[:, 0])
        except NumericalError:
            continue
    return out


def distance_surface_on_grid(
    master: EpidemicParams,
    tau_grid: Sequence[float],
    n_grid: Sequence[float],
    horizon_days: int,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-8,
    threads: Optional[int] = None,
) -> DistanceSurface:
    tau_grid = np.asarray(tau_grid, dtype=float)
    n_grid = np.asarray(n_grid, dtype=float)
    if tau_grid.ndim != 1 or n_grid.ndim != 1 or len(tau_grid) < 2 or len(n_grid) < 2:
        raise InvalidParameterError("surface grid must be at least 2x2")
    horizon = int(horizon_days)
    if horizon < 1:
        raise InvalidParameterError("horizon must be at least one day")
    ref = incidence_of(master, horizon, rel_tol, abs_tol).new_cases
    if ref[-1] >= 1e-6 * master.N:
        raise InvalidParameterError(
            f"horizon of {horizon} days does not cover the master epidemic (last-day incidence {ref[-1]:.3g})"
        )
    threads = _default_threads() if threads is None else threads
    D = np.full((len(tau_grid), len(n_grid)), np.nan)

    def work(j):
        cols = _column(master, tau_grid, float(n_grid[j]), horizon, rel_tol, abs_tol)
        return j, np.linalg.norm(cols - ref[:, None], axis=0) / master.N

    # each degree is one batch, so results do not depend on the thread count
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for j, dist in pool.map(work, range(len(n_grid))):
            D[:, j] = dist
    return DistanceSurface(tau_grid, n_grid, D, master, horizon)


def distance_surface(
    master: EpidemicParams,
    tau_range: tuple[float, float],
    n_range: tuple[float, float],
    grid_dims: tuple[int, int],
    horizon_days: int,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-8,
    threads: Optional[int] = None,
) -> DistanceSurface:
    """D[i, j] = ||c_master - c(tau_i, n_j)||_2 / N on a left-open window."""
    if master.tau <= 0 or master.kind is None:
        raise InvalidParameterError("master must be supercritical")
    tau_grid = left_open_grid(*tau_range, grid_dims[0])
    n_grid = left_open_grid(*n_range, grid_dims[1])
    return distance_surface_on_grid(master, tau_grid, n_grid, horizon_days, rel_tol, abs_tol, threads)


@dataclass(frozen=True)
class ValleyProfile:
    """D sampled along the final-size curve through the master point."""

    n: np.ndarray
    tau: np.ndarray
    D: np.ndarray


def valley_profile(surface: DistanceSurface, s_inf: float) -> ValleyProfile:
    """Interpolate the surface linearly in tau along tau = tau_s(n_j) for every
    grid degree n_j whose curve value falls inside the tau window."""
    m = surface.master
    ns, taus, ds = [], [], []
    for j, n in enumerate(surface.n_grid):
        try:
            tau = tau_on_finalsize_curve(m.kind, s_inf, m.gamma, float(n), m.phiS0 if m.kind is ModelKind.EBCM else 1.0)
        except (InvalidParameterError, NumericalError):
            continue
        if not (surface.tau_grid[0] <= tau <= surface.tau_grid[-1]):
            continue
        col = surface.D[:, j]
        ns.append(float(n))
        taus.append(tau)
        ds.append(float(np.interp(tau, surface.tau_grid, col)))
    return ValleyProfile(np.array(ns), np.array(taus), np.array(ds))


def strict_local_minima(values: Sequence[float]) -> list[int]:
    """Interior indices strictly below both neighbours."""
    v = np.asarray(values, dtype=float)
    return [i for i in range(1, len(v) - 1) if v[i] < v[i - 1] and v[i] < v[i + 1]]
