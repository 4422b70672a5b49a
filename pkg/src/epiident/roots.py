"""Bracketing scalar root finders."""

from __future__ import annotations

import math
from typing import Callable, Optional

from .errors import RootBracketError

__all__ = ["bisect", "bisect_polish"]


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 0.0, max_iter: int = 2000) -> float:
    """Bisection on a sign-changing bracket.

    With ``xtol=0`` iterates until the midpoint is no longer representable
    between the endpoints, i.e. to full floating-point resolution.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise RootBracketError(f"no sign change on [{lo:.6g}, {hi:.6g}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if math.copysign(1.0, fmid) == math.copysign(1.0, flo):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return lo if abs(flo) < abs(fhi) else hi


def bisect_polish(
    f: Callable[[float], float],
    fprime: Optional[Callable[[float], float]],
    lo: float,
    hi: float,
    xtol: float = 1e-12,
) -> float:
    """Bisect to ``xtol`` and apply one Newton step if it stays in the bracket."""
    root = bisect(f, lo, hi, xtol)
    if fprime is None:
        return root
    d = fprime(root)
    if d == 0.0 or not math.isfinite(d):
        return root
    polished = root - f(root) / d
    if lo <= polished <= hi and abs(f(polished)) <= abs(f(root)):
        return polished
    return root
