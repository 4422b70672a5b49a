"""Leading eigenvalues, final epidemic sizes and the two tau(n) curves.

Every model's observables can be written as

    lambda = tau * l(n) - gamma
    a(n, s) * tau + b(n, s) * gamma = 0       (final-size relation)

so for fixed n the pair (tau, gamma) solves a 2x2 linear system, and for
fixed gamma each relation defines a curve tau(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegenerateCurveError,
    DomainError,
    InvalidParameterError,
    RootBracketError,
    UnidentifiablePairError,
)
from .models import EpidemicParams, ModelKind, degree_factor
from .roots import bisect_polish

__all__ = [
    "Observables",
    "leading_eigenvalue",
    "final_size_implicit",
    "final_size_relation",
    "compute_observables",
    "observables_of",
    "tau_on_eigenvalue_curve",
    "tau_on_finalsize_curve",
    "tau_on_finalsize_curve_kappa1_general",
    "solve_tau_gamma",
]

_S_LO = 1e-12
_S_LO_FALLBACK = 1e-300
_S_HI = (1 - 1e-6, 1 - 1e-9)
_MIN_SEPARATION = 1e-5
_DEGENERATE = 1e-14
_DET_RTOL = 1e-12


@dataclass(frozen=True)
class Observables:
    lam: float
    s_inf: float

    @property
    def r_inf(self) -> float:
        return 1.0 - self.s_inf

    @property
    def subcritical(self) -> bool:
        return self.lam <= 0


def _check_rates(tau, gamma, n):
    if not (tau >= 0 and gamma > 0 and n > 0):
        raise InvalidParameterError(f"need tau >= 0, gamma > 0, n > 0 (got {tau}, {gamma}, {n})")


def leading_eigenvalue(kind: ModelKind, tau: float, gamma: float, n: float) -> float:
    """Dominant eigenvalue of the linearisation at the disease-free state."""
    kind = ModelKind.parse(kind)
    _check_rates(tau, gamma, n)
    if kind is ModelKind.COMPARTMENTAL:
        return tau * n - gamma
    return tau * degree_factor(kind, n) - gamma


def final_size_relation(kind: ModelKind, tau: float, gamma: float, n: float, phiS0: float = 1.0):
    """Return ``(g, g')``: the final-size relation g(s) = 0 and its derivative."""
    kind = ModelKind.parse(kind)
    if kind is ModelKind.COMPARTMENTAL:
        R0 = tau * n / gamma

        def g(s):
            return R0 * (1.0 - s) + math.log(s)

        def dg(s):
            return -R0 + 1.0 / s

    elif kind is ModelKind.PAIRWISE_NM1:
        p1, p2 = 1.0 / n, 2.0 / n

        def g(s):
            a, b = s ** p1, s ** p2
            return tau * (s - b) + gamma * (a - b)

        def dg(s):
            return tau * (1.0 - p2 * s ** (p2 - 1)) + gamma * (p1 * s ** (p1 - 1) - p2 * s ** (p2 - 1))

    else:

        def g(s):
            return tau * n * phiS0 * s - (tau + gamma) * math.log(s) - tau * n

        def dg(s):
            return tau * n * phiS0 - (tau + gamma) / s

    return g, dg


def final_size_implicit(kind: ModelKind, tau: float, gamma: float, n: float, phiS0: float = 1.0) -> float:
    """Final susceptible fraction s_inf from the model's implicit relation.

    Subcritical parameters (lambda <= 0) give s_inf = 1. ``phiS0`` only
    enters the kappa=1 pairwise and EBCM relations.
    """
    kind = ModelKind.parse(kind)
    lam = leading_eigenvalue(kind, tau, gamma, n)
    if not (0 < phiS0 <= 1):
        raise InvalidParameterError(f"phiS0 must lie in (0, 1], got {phiS0}")
    if lam <= 0:
        return 1.0
    uses_phi = kind in (ModelKind.PAIRWISE_K1, ModelKind.EBCM)
    g, dg = final_size_relation(kind, tau, gamma, n, phiS0)

    lo = _S_LO
    glo = g(lo)
    hi = None
    for cand in _S_HI:
        if math.copysign(1.0, g(cand)) != math.copysign(1.0, glo):
            hi = cand
            break
    if hi is None:
        # very large reproduction numbers push the root below 1e-12
        lo = _S_LO_FALLBACK
        glo = g(lo)
        for cand in _S_HI:
            if math.copysign(1.0, g(cand)) != math.copysign(1.0, glo):
                hi = cand
                break
    if hi is None:
        raise RootBracketError(f"no sign change of the {kind.value} final-size relation in (0, 1)")
    # full resolution: small roots need relative, not absolute, accuracy
    root = bisect_polish(g, dg, lo, hi, xtol=0.0)
    trivial_root_present = not uses_phi or phiS0 == 1.0
    if trivial_root_present and 1.0 - root <= _MIN_SEPARATION:
        raise RootBracketError(f"final-size root {root!r} is not separated from the trivial root s=1")
    return root


def compute_observables(kind: ModelKind, tau: float, gamma: float, n: float, phiS0: float = 1.0) -> Observables:
    return Observables(
        leading_eigenvalue(kind, tau, gamma, n),
        final_size_implicit(kind, tau, gamma, n, phiS0),
    )


def observables_of(params: EpidemicParams) -> Observables:
    return compute_observables(params.kind, params.tau, params.gamma, params.n, params.phiS0)


def tau_on_eigenvalue_curve(kind: ModelKind, lam: float, gamma: float, n: float) -> float:
    """tau = (lambda + gamma) / l(n)."""
    kind = ModelKind.parse(kind)
    l = degree_factor(kind, n)
    if not l > 0:
        raise DomainError(f"l(n) = {l} <= 0 for {kind.value} at n={n}")
    if lam + gamma < 0:
        raise InvalidParameterError("lambda + gamma must be >= 0")
    return (lam + gamma) / l


def _check_s(s_inf):
    if not (0 < s_inf < 1):
        raise DomainError(f"s_inf must lie in (0, 1), got {s_inf}")


def tau_on_finalsize_curve(kind: ModelKind, s_inf: float, gamma: float, n: float, phiS0: float = 1.0) -> float:
    """Transmission rate that produces final size ``s_inf`` at degree ``n``."""
    kind = ModelKind.parse(kind)
    _check_s(s_inf)
    if kind is ModelKind.COMPARTMENTAL:
        num, den = -gamma * math.log(s_inf), n * (1.0 - s_inf)
    elif kind is ModelKind.PAIRWISE_NM1:
        if not n > 2:
            raise DomainError(f"pairwise final-size curve has a pole at n=2; need n > 2, got {n}")
        a, b = s_inf ** (1.0 / n), s_inf ** (2.0 / n)
        num, den = gamma * (a - b), b - s_inf
    else:
        if not n > 1:
            raise DomainError(f"need n > 1, got {n}")
        ln_s = math.log(s_inf)
        num, den = gamma * ln_s, n * phiS0 * s_inf - ln_s - n
    if abs(den) < _DEGENERATE:
        raise DegenerateCurveError(f"final-size curve denominator vanishes at n={n}, s_inf={s_inf}")
    return num / den


def tau_on_finalsize_curve_kappa1_general(S0: float, SS0: float, SI0: float, gamma: float, S_inf: float) -> float:
    """Final-size curve of the kappa=1 pairwise model for arbitrary initial
    node and pair counts; ``S_inf`` is a count, not a fraction."""
    if not S0 > 0:
        raise InvalidParameterError("S0 must be positive")
    if not (0 < S_inf < S0):
        raise DomainError(f"S_inf must lie in (0, S0), got {S_inf}")
    if SS0 < 0 or SI0 < 0:
        raise InvalidParameterError("pair counts must be non-negative")
    log_ratio = math.log(S_inf) - math.log(S0)
    num = gamma * S_inf * log_ratio
    den = (SS0 / S0**2) * S_inf**2 - S_inf * log_ratio - (SI0 / S0 + SS0 / S0) * S_inf
    if den == 0.0 or abs(den) < _DEGENERATE * max(1.0, S_inf * (SS0 / S0 + abs(log_ratio))):
        raise DegenerateCurveError("kappa=1 final-size denominator vanishes")
    return num / den


def _finalsize_coefficients(kind: ModelKind, n: float, s_inf: float, phiS0: float):
    """(a, b) with a*tau + b*gamma = 0 on the final-size relation."""
    if kind is ModelKind.COMPARTMENTAL:
        return n * (1.0 - s_inf), math.log(s_inf)
    if kind is ModelKind.PAIRWISE_NM1:
        a, b = s_inf ** (1.0 / n), s_inf ** (2.0 / n)
        return s_inf - b, a - b
    ln_s = math.log(s_inf)
    return n * phiS0 * s_inf - ln_s - n, -ln_s


def solve_tau_gamma(kind: ModelKind, n: float, lam: float, s_inf: float, phiS0: float = 1.0) -> tuple[float, float]:
    """Recover (tau, gamma) from (lambda, s_inf) at a known degree ``n``."""
    kind = ModelKind.parse(kind)
    if not (0 < s_inf <= 1):
        raise DomainError(f"s_inf must lie in (0, 1], got {s_inf}")
    l = degree_factor(kind, n)
    if not l > 0:
        raise DomainError(f"l(n) = {l} <= 0 for {kind.value} at n={n}")
    a, b = _finalsize_coefficients(kind, n, s_inf, phiS0)
    # rows: [l, -1] . (tau, gamma) = lam ; [a, b] . (tau, gamma) = 0
    det = l * b + a
    scale = math.hypot(l, 1.0) * math.hypot(a, b)
    if scale == 0.0 or abs(det) <= _DET_RTOL * scale:
        raise UnidentifiablePairError(f"(tau, gamma) not identifiable at n={n}: determinant {det:.3g}")
    return lam * b / det, -a * lam / det
