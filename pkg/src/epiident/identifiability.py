"""Reduced one-dimensional identification problem in the degree n.

Eliminating tau between the eigenvalue curve and the final-size curve
leaves a scalar equation in n:

    pairwise (kappa = (n-1)/n):   (lambda + gamma) / gamma = f(n)
    kappa = 1 pairwise and EBCM:  (lambda + gamma) / gamma = q * f(n)

with f(n) = (s^(1/n) - s^(2/n)) / (s^(2/n) - s) * (n - 2) in the first
case and f(n) = (n - 1) / (n - q), q = ln(s) / (s - 1), in the second.
Since f barely varies over its whole domain, a small error in the
observables moves the solution n* by a large amount.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    InvalidParameterError,
    NoIntersectionError,
    NumericalError,
    StructuralUnidentifiabilityError,
)
from .models import ModelKind
from .observables import tau_on_eigenvalue_curve, tau_on_finalsize_curve
from .roots import bisect

__all__ = [
    "CurvePair",
    "ReducedProfile",
    "EpsilonSet",
    "PropositionReport",
    "q_value",
    "reduced_f",
    "reduced_f_limits",
    "reduced_profile",
    "reduced_target",
    "intersections",
    "solve_intersection",
    "intersection_sensitivity",
    "epsilon_solution_set",
    "h_function",
    "h_derivatives_at_one",
    "proposition_check",
    "curve_pair",
]

_N_MAX_SCAN = 1e12
_SCAN_POINTS = 4000
_RESIDUAL_TOL = 1e-12


def _reduced_kind(kind: ModelKind) -> ModelKind:
    kind = ModelKind.parse(kind)
    if kind is ModelKind.COMPARTMENTAL:
        raise StructuralUnidentifiabilityError(
            "compartmental model: lambda and s_inf depend on tau and n only through the product tau*n"
        )
    return kind


def _check_s(s_inf):
    if not (0 < s_inf < 1):
        raise DomainError(f"s_inf must lie in (0, 1), got {s_inf}")


def q_value(s_inf: float) -> float:
    """q = ln(s) / (s - 1) > 1."""
    _check_s(s_inf)
    return math.log(s_inf) / (s_inf - 1.0)


def _pairwise_f(n: float, log_s: float) -> float:
    # f written in x = 1/n with expm1 so that neither n -> 2 nor n -> inf cancels
    x = 1.0 / n
    y = 2.0 * x - 1.0
    return math.exp(x * log_s) * (math.expm1(x * log_s) / x) * (y / math.expm1(y * log_s)) / math.exp(log_s)


def _reduced_f_array(kind: ModelKind, ns: np.ndarray, s_inf: float) -> np.ndarray:
    if kind is ModelKind.PAIRWISE_NM1:
        log_s = math.log(s_inf)
        x = 1.0 / ns
        y = 2.0 * x - 1.0
        return np.exp(x * log_s) * (np.expm1(x * log_s) / x) * (y / np.expm1(y * log_s)) / s_inf
    return (ns - 1.0) / (ns - q_value(s_inf))


def reduced_f(kind: ModelKind, n: float, s_inf: float) -> float:
    kind = _reduced_kind(kind)
    _check_s(s_inf)
    if kind is ModelKind.PAIRWISE_NM1:
        if not n > 2:
            raise DomainError(f"pairwise reduced function needs n > 2, got {n}")
        if math.isinf(n):
            return math.log(s_inf) / (s_inf - 1.0)
        return _pairwise_f(n, math.log(s_inf))
    q = q_value(s_inf)
    if not n > q:
        raise DomainError(f"reduced function needs n > q = {q:.6g}, got {n}")
    if math.isinf(n):
        return 1.0
    return (n - 1.0) / (n - q)


def reduced_f_limits(kind: ModelKind, s_inf: float) -> tuple[float, float]:
    """Limits of f at the ends of its domain, ordered (lower, upper).

    Pairwise: (f(2+), f(inf)), f increasing when the proposition holds.
    EBCM and kappa=1: (f(inf), f(q+)) = (1, inf), f decreasing.
    """
    kind = _reduced_kind(kind)
    _check_s(s_inf)
    if kind is ModelKind.PAIRWISE_NM1:
        f2 = 2.0 * (s_inf - math.sqrt(s_inf)) / (s_inf * math.log(s_inf))
        f_inf = math.log(s_inf) / (s_inf - 1.0)
        return f2, f_inf
    return 1.0, math.inf


def _domain_lower(kind: ModelKind, s_inf: float) -> float:
    return 2.0 if kind is ModelKind.PAIRWISE_NM1 else q_value(s_inf)


def reduced_target(kind: ModelKind, lam: float, s_inf: float, gamma: float) -> float:
    """Value f(n*) must take for the measured (lambda, s_inf, gamma)."""
    kind = _reduced_kind(kind)
    if not gamma > 0:
        raise InvalidParameterError("gamma must be positive")
    target = (lam + gamma) / gamma
    if kind is not ModelKind.PAIRWISE_NM1:
        target /= q_value(s_inf)
    return target


def _limit_at_lower(kind, s_inf):
    return reduced_f_limits(kind, s_inf)[0] if kind is ModelKind.PAIRWISE_NM1 else math.inf


def _limit_at_infinity(kind, s_inf):
    return reduced_f_limits(kind, s_inf)[1] if kind is ModelKind.PAIRWISE_NM1 else 1.0


def _crossings(kind: ModelKind, s_inf: float, level: float) -> list[float]:
    """All n in the domain with f(n) = level, located by bisection on
    sign-change brackets of a log-spaced scan."""
    lower = _domain_lower(kind, s_inf)
    # scan in log(n - lower) so that both ends of the domain are resolved
    offsets = np.geomspace(1e-9 * max(lower, 1.0), _N_MAX_SCAN, _SCAN_POINTS)
    ns = lower + offsets
    ns = ns[ns > lower]

    def g(n):
        return reduced_f(kind, n, s_inf) - level

    values = (_reduced_f_array(kind, ns, s_inf) - level).tolist()
    ns = ns.tolist()
    out = []
    left = _limit_at_lower(kind, s_inf) - level
    if left != 0 and values[0] != 0 and math.copysign(1, left) != math.copysign(1, values[0]):
        out.append(bisect(g, math.nextafter(lower, math.inf), ns[0]))
    for i in range(len(ns) - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            out.append(ns[i])
        elif b != 0.0 and math.copysign(1, a) != math.copysign(1, b):
            out.append(bisect(g, ns[i], ns[i + 1]))
    if values[-1] == 0.0:
        out.append(ns[-1])
    right = _limit_at_infinity(kind, s_inf) - level
    if right != 0 and values[-1] != 0 and math.copysign(1, right) != math.copysign(1, values[-1]):
        # beyond the scan: bisect in x = 1/n
        def gx(x):
            return reduced_f(kind, 1.0 / x, s_inf) - level

        out.append(1.0 / bisect(gx, 1e-300, 1.0 / ns[-1]))
    return sorted(out)


def intersections(kind: ModelKind, lam: float, s_inf: float, gamma: float) -> list[tuple[float, float]]:
    """Every (n, tau) where the eigenvalue and final-size curves meet."""
    kind = _reduced_kind(kind)
    _check_s(s_inf)
    target = reduced_target(kind, lam, s_inf, gamma)
    return [(n, tau_on_eigenvalue_curve(kind, lam, gamma, n)) for n in _crossings(kind, s_inf, target)]


def solve_intersection(kind: ModelKind, lam: float, s_inf: float, gamma: float) -> tuple[float, float]:
    """Intersection (n*, tau*) of the two curves.

    When f is monotone (the usual case) the intersection is unique. For
    very large epidemics the pairwise f overshoots its limit at infinity
    and the curves may cross twice; the crossing of smallest degree is
    returned and :func:`intersections` lists them all.
    """
    kind = _reduced_kind(kind)
    found = intersections(kind, lam, s_inf, gamma)
    if not found:
        lo, hi = reduced_f_limits(kind, s_inf)
        raise NoIntersectionError(
            f"no degree reproduces lambda={lam:.6g}, s_inf={s_inf:.6g}: "
            f"target {reduced_target(kind, lam, s_inf, gamma):.6g} outside the range of f near ({lo:.6g}, {hi:.6g})"
        )
    n_star, tau_star = found[0]
    scale = 1.0 if kind is ModelKind.PAIRWISE_NM1 else q_value(s_inf)
    residual = abs(gamma * scale * reduced_f(kind, n_star, s_inf) - (lam + gamma))
    if residual >= _RESIDUAL_TOL:
        raise NumericalError(f"intersection residual {residual:.3g} exceeds {_RESIDUAL_TOL}")
    return n_star, tau_star


def intersection_sensitivity(kind: ModelKind, n_star: float, s_inf: float, rel_step: float = 1e-5) -> float:
    """|f'(n*)|^-1, the amplification of an error in f(n*) into n*."""
    kind = _reduced_kind(kind)
    h = rel_step * n_star
    lower = _domain_lower(kind, s_inf)
    lo = max(n_star - h, lower + 0.5 * (n_star - lower))
    slope = (reduced_f(kind, n_star + h, s_inf) - reduced_f(kind, lo, s_inf)) / (n_star + h - lo)
    return math.inf if slope == 0 else 1.0 / abs(slope)


@dataclass(frozen=True)
class CurvePair:
    kind: ModelKind
    n_grid: np.ndarray
    tau_lambda: np.ndarray
    tau_s: np.ndarray
    lam: float
    s_inf: float
    gamma: float


def curve_pair(kind: ModelKind, lam: float, s_inf: float, gamma: float, n_grid: Sequence[float], phiS0: float = 1.0) -> CurvePair:
    """Both tau(n) curves on ``n_grid``; points outside a curve's domain or
    with non-positive tau are NaN."""
    kind = ModelKind.parse(kind)
    n_grid = np.asarray(n_grid, dtype=float)
    tl = np.full(n_grid.shape, np.nan)
    ts = np.full(n_grid.shape, np.nan)
    for i, n in enumerate(n_grid):
        try:
            tl[i] = tau_on_eigenvalue_curve(kind, lam, gamma, n)
        except DomainError:
            pass
        try:
            v = tau_on_finalsize_curve(kind, s_inf, gamma, n, phiS0)
            ts[i] = v if v > 0 else np.nan
        except (DomainError, NumericalError):
            pass
    return CurvePair(kind, n_grid, tl, ts, lam, s_inf, gamma)


@dataclass(frozen=True)
class ReducedProfile:
    kind: ModelKind
    s_inf: float
    n_grid: np.ndarray
    f_values: np.ndarray
    f_inf: float
    f2: float = math.nan
    q: float = math.nan


def reduced_profile(kind: ModelKind, s_inf: float, n_grid: Sequence[float]) -> ReducedProfile:
    kind = _reduced_kind(kind)
    n_grid = np.asarray(n_grid, dtype=float)
    f_values = np.array([reduced_f(kind, n, s_inf) for n in n_grid])
    lo, hi = reduced_f_limits(kind, s_inf)
    if kind is ModelKind.PAIRWISE_NM1:
        return ReducedProfile(kind, s_inf, n_grid, f_values, f_inf=hi, f2=lo)
    return ReducedProfile(kind, s_inf, n_grid, f_values, f_inf=1.0, q=q_value(s_inf))


@dataclass(frozen=True)
class EpsilonSet:
    """Degrees n with |f(n) - f(n*)| < epsilon, as a union of open intervals
    (an upper end of ``inf`` marks a half-line)."""

    kind: ModelKind
    s_inf: float
    n_star: float
    epsilon: float
    intervals: tuple[tuple[float, float], ...]
    infinite_measure: bool

    def __contains__(self, n: float) -> bool:
        return any(lo < n < hi for lo, hi in self.intervals)


def epsilon_solution_set(kind: ModelKind, lam: float, s_inf: float, gamma: float, epsilon: float) -> EpsilonSet:
    kind = _reduced_kind(kind)
    if not epsilon > 0:
        raise InvalidParameterError("epsilon must be positive")
    n_star, _ = solve_intersection(kind, lam, s_inf, gamma)
    f_star = reduced_f(kind, n_star, s_inf)
    lower = _domain_lower(kind, s_inf)

    breaks = sorted(set(_crossings(kind, s_inf, f_star - epsilon) + _crossings(kind, s_inf, f_star + epsilon)))
    edges = [lower] + breaks + [math.inf]

    def inside(a, b):
        if math.isinf(b):
            probe = max(2.0 * a, a + 1.0, _N_MAX_SCAN)
        elif a == lower:
            probe = a + 0.5 * (b - a)
        else:
            probe = 0.5 * (a + b)
        return abs(reduced_f(kind, probe, s_inf) - f_star) < epsilon

    intervals: list[list[float]] = []
    for a, b in zip(edges[:-1], edges[1:]):
        if a == b or not inside(a, b):
            continue
        if intervals and intervals[-1][1] == a:
            intervals[-1][1] = b
        else:
            intervals.append([a, b])
    result = tuple((a, b) for a, b in intervals)
    return EpsilonSet(kind, s_inf, n_star, epsilon, result, bool(result) and math.isinf(result[-1][1]))


def h_function(b: float, n: float) -> float:
    """n(1-b)(1-b^(n-2)) + (n-2)(1 + b^(n-2) - 2b^(n-1)) ln b.

    Positivity of h on b in (0, 1) is equivalent to the pairwise f being
    increasing at degree n.
    """
    if not (0 < b) or not n > 2:
        raise DomainError("h needs b > 0 and n > 2")
    return n * (1 - b) * (1 - b ** (n - 2)) + (n - 2) * (1 + b ** (n - 2) - 2 * b ** (n - 1)) * math.log(b)


def h_derivatives_at_one(n: float, step: float = 1e-4) -> tuple[float, float, float]:
    """Central finite-difference estimates of h', h'', h''' at b = 1.

    Fourth-order accurate stencils: the plain three-point second difference
    carries a bias of h''''(1) * step^2 / 12, which at n = 10 is already
    ~4e-6 and would swamp the zero being measured.
    """
    d = step
    hp = [h_function(1.0 + k * d, n) for k in (1, 2, 3)]
    hm = [h_function(1.0 - k * d, n) for k in (1, 2, 3)]
    h0 = h_function(1.0, n)
    d1 = (8 * (hp[0] - hm[0]) - (hp[1] - hm[1])) / (12 * d)
    d2 = (-(hp[1] + hm[1]) + 16 * (hp[0] + hm[0]) - 30 * h0) / (12 * d * d)
    d3 = (-(hp[2] - hm[2]) + 8 * (hp[1] - hm[1]) - 13 * (hp[0] - hm[0])) / (8 * d**3)
    return d1, d2, d3


@dataclass
class PropositionReport:
    s_grid: np.ndarray
    n_grid: np.ndarray
    increasing: np.ndarray
    bounded: np.ndarray
    f2: np.ndarray
    f_inf: np.ndarray
    failures: list[str] = field(default_factory=list)

    @property
    def holds(self) -> np.ndarray:
        return self.increasing & self.bounded

    @property
    def smallest_passing(self) -> float:
        """Smallest tested s_inf at and above which every tested value passes
        (an empirical upper bound on the proposition's threshold)."""
        order = np.argsort(self.s_grid)
        best = math.nan
        for i in order[::-1]:
            if not self.holds[i]:
                break
            best = float(self.s_grid[i])
        return best


def proposition_check(s_grid: Sequence[float], n_grid: Sequence[float]) -> PropositionReport:
    """Check that the pairwise f is increasing with range (f2, f_inf) on a grid."""
    s_grid = np.asarray(s_grid, dtype=float)
    n_grid = np.sort(np.asarray(n_grid, dtype=float))
    inc = np.zeros(len(s_grid), dtype=bool)
    bnd = np.zeros(len(s_grid), dtype=bool)
    f2s = np.empty(len(s_grid))
    fis = np.empty(len(s_grid))
    failures = []
    for i, s in enumerate(s_grid):
        f2, f_inf = reduced_f_limits(ModelKind.PAIRWISE_NM1, s)
        f = np.array([reduced_f(ModelKind.PAIRWISE_NM1, n, s) for n in n_grid])
        inc[i] = bool(np.all(np.diff(f) > 0))
        bnd[i] = bool(np.all((f > f2) & (f < f_inf)))
        f2s[i], fis[i] = f2, f_inf
        if not inc[i]:
            k = int(np.argmax(np.diff(f) <= 0))
            failures.append(f"s_inf={s:g}: f not increasing near n={n_grid[k]:.6g}")
        if not bnd[i]:
            failures.append(f"s_inf={s:g}: f leaves ({f2:.6g}, {f_inf:.6g})")
    return PropositionReport(s_grid, n_grid, inc, bnd, f2s, fis, failures)
