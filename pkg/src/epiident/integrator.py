"""Adaptive Dormand-Prince 5(4) integration with dense output.

The stepper advances a state array of shape ``(dim, ...)``; trailing axes
are independent members of a batch that share the step sequence (the
error norm is the worst member's RMS norm). Output is sampled on a uniform
grid through the pair's fourth-order continuous extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import IntegrationError, InvalidParameterError, SingularStateError
from .models import (
    EpidemicParams,
    ModelKind,
    _rhs,
    initial_state,
    prevalence,
    susceptible,
)

__all__ = [
    "Trajectory",
    "IncidenceSeries",
    "dopri45",
    "integrate",
    "integrate_many",
    "daily_incidence",
    "final_size_from_trajectory",
    "DEFAULT_T_END",
]

DEFAULT_T_END = 2000.0
DAY = 1.0
STATE_SLACK = 1e-9

# Dormand-Prince tableau
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# fifth-order minus embedded fourth-order weights, stage 7 = FSAL
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension (Shampine), coefficients of sigma, sigma^2, sigma^3, sigma^4
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_MIN_FACTOR, _MAX_FACTOR = 0.2, 10.0


def _norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    per_member = np.sqrt(np.mean((err / scale) ** 2, axis=0))
    return float(np.max(per_member))


def _initial_step(fun, y0, f0, rtol, atol, t_end) -> float:
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.max(np.sqrt(np.mean((y0 / scale) ** 2, axis=0))))
    d1 = float(np.max(np.sqrt(np.mean((f0 / scale) ** 2, axis=0))))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_end)
    try:
        f1 = fun(y0 + h0 * f0)
    except SingularStateError:
        return h0 * 1e-3
    d2 = float(np.max(np.sqrt(np.mean(((f1 - f0) / scale) ** 2, axis=0)))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, t_end)


def dopri45(
    fun: Callable[[np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_end: float,
    dt_out: float,
    rtol: float = 1e-8,
    atol: float = 1e-8,
    check: Optional[Callable[[float, np.ndarray], None]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the autonomous system ``y' = fun(y)`` from t=0 to ``t_end``.

    Returns ``(times, states)`` with ``times = k*dt_out`` and ``states`` of
    shape ``(len(times),) + y0.shape``. ``check(t, y)`` is called on every
    accepted step and may raise :class:`IntegrationError`.
    """
    if not t_end > 0 or not dt_out > 0:
        raise InvalidParameterError("t_end and dt_out must be positive")
    if not (0 < rtol <= 1e-2 and 0 < atol <= 1e-2):
        raise InvalidParameterError("tolerances must lie in (0, 1e-2]")
    n_out = int(math.floor(t_end / dt_out + 1e-9))
    times = np.arange(n_out + 1) * dt_out
    y = np.array(y0, dtype=float)
    out = np.empty((n_out + 1,) + y.shape)
    out[0] = y
    next_out = 1

    h_min = 1e-12 * t_end
    f = fun(y)
    h = _initial_step(fun, y, f, rtol, atol, t_end)
    t = 0.0
    err_prev = 1e-4
    K = np.empty((7,) + y.shape)
    while t < t_end and next_out <= n_out:
        if h < h_min and t_end - t > h_min:
            raise IntegrationError(f"step size underflow at t={t:.6g} (h={h:.3g})")
        h = min(h, t_end - t)
        K[0] = f
        try:
            for s in range(1, 6):
                dy = np.tensordot(_A[s], K[:s], axes=1)
                K[s] = fun(y + h * dy)
            y_new = y + h * np.tensordot(_B, K[:6], axes=1)
            K[6] = f_new = fun(y_new)
        except SingularStateError:
            h *= 0.25
            continue
        err = _norm(h * np.tensordot(_E, K, axes=1), y, y_new, rtol, atol)
        if not math.isfinite(err):
            h *= 0.25
            continue
        if err > 1.0:
            h *= max(_MIN_FACTOR, _SAFETY * err ** -_ALPHA)
            continue

        t_new = t + h
        if check is not None:
            check(t_new, y_new)
        while next_out <= n_out and times[next_out] <= t_new + 1e-12 * t_end:
            sigma = (times[next_out] - t) / h
            powers = sigma ** np.arange(1, 5)
            out[next_out] = y + h * np.tensordot(_P @ powers, K, axes=1)
            next_out += 1

        if err == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = _SAFETY * err ** -_ALPHA * err_prev ** _BETA
            factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        err_prev = max(err, 1e-4)
        t, y, f = t_new, y_new, f_new
        h *= factor
    return times, out


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    kind: ModelKind
    params: EpidemicParams

    @property
    def susceptible(self) -> np.ndarray:
        return susceptible(self.kind, self.states, self.params)

    @property
    def prevalence(self) -> np.ndarray:
        return prevalence(self.kind, self.states, self.params)

    @property
    def cumulative(self) -> np.ndarray:
        """Cumulative infections N - S(t), including the initial seed."""
        return self.params.N - self.susceptible

    @property
    def dt_out(self) -> float:
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class IncidenceSeries:
    day_index: np.ndarray
    new_cases: np.ndarray

    def __len__(self) -> int:
        return len(self.new_cases)


def _state_check(kind: ModelKind, N):
    slack = STATE_SLACK * np.asarray(N)

    def check(t, y):
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at t={t:.6g}")
        if kind is ModelKind.EBCM:
            theta, R = y
            if np.any(theta < -STATE_SLACK) or np.any(theta > 1 + STATE_SLACK) or np.any(R < -slack):
                raise IntegrationError(f"EBCM state left its domain at t={t:.6g}")
        elif np.any(y < -slack):
            raise IntegrationError(f"negative count beyond slack at t={t:.6g}")

    return check


def integrate(
    kind: ModelKind,
    params: EpidemicParams,
    t_end: float = DEFAULT_T_END,
    dt_out: float = 1.0,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-8,
) -> Trajectory:
    kind = ModelKind.parse(kind)
    if kind is not params.kind:
        raise InvalidParameterError(f"params were built for {params.kind.value}, not {kind.value}")
    extra = {}
    if kind is ModelKind.EBCM:
        extra = dict(phiS0=params.init.phiS0, phiR0=params.init.phiR0)

    def fun(y):
        return _rhs(kind, y, params.tau, params.gamma, params.n, params.N, **extra)

    times, states = dopri45(fun, initial_state(params), t_end, dt_out, rel_tol, abs_tol,
                            check=_state_check(kind, params.N))
    return Trajectory(times, states, kind, params)


def integrate_many(
    kind: ModelKind,
    taus,
    ns,
    gamma: float,
    N: float,
    I0: float,
    t_end: float,
    dt_out: float = 1.0,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate a batch of seeded epidemics that differ only in (tau, n).

    Returns ``(times, cumulative)`` where ``cumulative`` has shape
    ``(len(times), len(taus))``.
    """
    kind = ModelKind.parse(kind)
    taus = np.asarray(taus, dtype=float)
    ns = np.broadcast_to(np.asarray(ns, dtype=float), taus.shape).copy()
    params0 = [EpidemicParams.seeded(kind, float(t), gamma, float(m), N, I0) for t, m in zip(taus, ns)]
    y0 = np.stack([initial_state(p) for p in params0], axis=-1)
    extra = {}
    if kind is ModelKind.EBCM:
        extra = dict(phiS0=params0[0].init.phiS0, phiR0=0.0)

    def fun(y):
        return _rhs(kind, y, taus, gamma, ns, N, **extra)

    times, states = dopri45(fun, y0, t_end, dt_out, rel_tol, abs_tol, check=_state_check(kind, N))
    if kind is ModelKind.EBCM:
        S = N * extra["phiS0"] * np.exp(ns * (states[:, 0] - 1.0))
    else:
        S = states[:, 0]
    return times, N - S


def _steps_per_day(dt_out: float) -> int:
    k = round(DAY / dt_out)
    if k < 1 or abs(k * dt_out - DAY) > 1e-9:
        raise InvalidParameterError(f"dt_out={dt_out} does not divide one day")
    return k


def daily_incidence(traj: Trajectory) -> IncidenceSeries:
    """New infections per day by differencing cumulative infections."""
    k = _steps_per_day(traj.dt_out)
    n_days = int(math.floor(traj.times[-1] / DAY + 1e-9))
    C = traj.cumulative[: n_days * k + 1 : k]
    return IncidenceSeries(np.arange(1, n_days + 1), np.diff(C))


def final_size_from_trajectory(traj: Trajectory) -> float:
    """Susceptible fraction at the last output time."""
    return float(traj.susceptible[-1] / traj.params.N)
