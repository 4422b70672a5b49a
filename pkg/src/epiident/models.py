"""Mean-field SIR models on networks.

Four model families share one parameter set (tau, gamma, n, N):

* ``COMPARTMENTAL``: well-mixed SIR with contact rate tau*n.
* ``PAIRWISE_NM1``: pairwise model closed with kappa = (n-1)/n.
* ``PAIRWISE_K1``: pairwise model closed with kappa = 1.
* ``EBCM``: edge-based compartmental model on a Poisson network,
  psi(x) = exp(n(x-1)).

State layouts::

    COMPARTMENTAL  (S, I)
    PAIRWISE_*     ([S], [I], [SI], [SS])   pairs counted in both directions
    EBCM           (theta, R)

The EBCM carries the removed count R alongside theta so that prevalence
I = N - S - R is available; theta evolves independently of R.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidParameterError, SingularStateError

__all__ = [
    "ModelKind",
    "CompartmentalInit",
    "PairwiseInit",
    "EbcmInit",
    "InitialConditions",
    "EpidemicParams",
    "default_initial_conditions",
    "initial_state",
    "rhs",
    "state_columns",
    "susceptible",
    "prevalence",
    "degree_factor",
]


class ModelKind(enum.Enum):
    COMPARTMENTAL = "compartmental"
    PAIRWISE_NM1 = "pairwise-nm1"
    PAIRWISE_K1 = "pairwise-k1"
    EBCM = "ebcm"

    @property
    def is_pairwise(self) -> bool:
        return self in (ModelKind.PAIRWISE_NM1, ModelKind.PAIRWISE_K1)

    @property
    def dim(self) -> int:
        return {ModelKind.COMPARTMENTAL: 2, ModelKind.EBCM: 2}.get(self, 4)

    @classmethod
    def parse(cls, label: Union[str, "ModelKind"]) -> "ModelKind":
        if isinstance(label, cls):
            return label
        try:
            return cls(label)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise InvalidParameterError(f"unknown model {label!r}; expected one of {names}") from None


def degree_factor(kind: ModelKind, n):
    """The linear factor l(n) in lambda = tau*l(n) - gamma."""
    if kind is ModelKind.COMPARTMENTAL:
        return n
    if kind is ModelKind.PAIRWISE_NM1:
        return n - 2.0
    return n - 1.0


@dataclass(frozen=True)
class CompartmentalInit:
    S0: float
    I0: float


@dataclass(frozen=True)
class PairwiseInit:
    S0: float
    I0: float
    SS0: float
    SI0: float


@dataclass(frozen=True)
class EbcmInit:
    theta0: float
    phiS0: float
    phiR0: float = 0.0


InitialConditions = Union[CompartmentalInit, PairwiseInit, EbcmInit]

_INIT_TYPES = {
    ModelKind.COMPARTMENTAL: CompartmentalInit,
    ModelKind.PAIRWISE_NM1: PairwiseInit,
    ModelKind.PAIRWISE_K1: PairwiseInit,
    ModelKind.EBCM: EbcmInit,
}


def default_initial_conditions(kind: ModelKind, N: float, I0: float, n: float) -> InitialConditions:
    """Seed ``I0`` infected nodes into an otherwise susceptible population.

    Pair counts follow random mixing, [AB]0 = n*[A]0*[B]0/N, which reduces
    to the disease-free steady state (N, 0, nN, 0) as I0 -> 0.
    """
    kind = ModelKind.parse(kind)
    if not (0 < I0 < N):
        raise InvalidParameterError(f"seed must satisfy 0 < I0 < N, got I0={I0}, N={N}")
    S0 = N - I0
    if kind is ModelKind.COMPARTMENTAL:
        return CompartmentalInit(S0, I0)
    if kind.is_pairwise:
        return PairwiseInit(S0, I0, n * S0 * S0 / N, n * S0 * I0 / N)
    return EbcmInit(1.0, S0 / N, 0.0)


@dataclass(frozen=True)
class EpidemicParams:
    kind: ModelKind
    tau: float
    gamma: float
    n: float
    N: float
    init: InitialConditions

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        for name in ("tau", "gamma", "n", "N"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be finite, got {v}")
        if self.tau < 0:
            raise InvalidParameterError(f"tau must be >= 0, got {self.tau}")
        if self.gamma <= 0 or self.n <= 0 or self.N <= 0:
            raise InvalidParameterError("gamma, n and N must be > 0")
        expected = _INIT_TYPES[self.kind]
        if not isinstance(self.init, expected):
            raise InvalidParameterError(
                f"{self.kind.value} needs {expected.__name__}, got {type(self.init).__name__}"
            )
        _check_init(self.init, self.N)

    @classmethod
    def seeded(cls, kind, tau: float, gamma: float, n: float, N: float = 10000.0, I0: float = 1.0):
        kind = ModelKind.parse(kind)
        return cls(kind, tau, gamma, n, N, default_initial_conditions(kind, N, I0, n))

    @property
    def phiS0(self) -> float:
        """Initial susceptible fraction (EBCM: probability a neighbour is susceptible)."""
        if isinstance(self.init, EbcmInit):
            return self.init.phiS0
        return self.init.S0 / self.N


def _check_init(init: InitialConditions, N: float) -> None:
    if isinstance(init, CompartmentalInit):
        if init.S0 < 0 or init.I0 < 0 or init.S0 + init.I0 > N * (1 + 1e-12):
            raise InvalidParameterError("compartmental ICs need S0, I0 >= 0 and S0 + I0 <= N")
    elif isinstance(init, PairwiseInit):
        if min(init.S0, init.I0, init.SS0, init.SI0) < 0:
            raise InvalidParameterError("pairwise ICs must be non-negative")
    else:
        if init.theta0 != 1.0:
            raise InvalidParameterError("EBCM requires theta0 = 1")
        if init.phiS0 < 0 or init.phiR0 < 0 or init.phiS0 + init.phiR0 > 1 + 1e-12:
            raise InvalidParameterError("EBCM needs phiS0, phiR0 >= 0 and phiS0 + phiR0 <= 1")


def initial_state(params: EpidemicParams) -> np.ndarray:
    init = params.init
    if isinstance(init, CompartmentalInit):
        return np.array([init.S0, init.I0], dtype=float)
    if isinstance(init, PairwiseInit):
        return np.array([init.S0, init.I0, init.SI0, init.SS0], dtype=float)
    return np.array([init.theta0, params.N * init.phiR0], dtype=float)


def state_columns(kind: ModelKind) -> tuple[str, ...]:
    if kind is ModelKind.COMPARTMENTAL:
        return ("S", "I")
    if kind.is_pairwise:
        return ("S", "I", "SI", "SS")
    return ("theta", "R")


def _rhs(kind, y, tau, gamma, n, N, phiS0=1.0, phiR0=0.0):
    """Vectorised right-hand side; ``y`` has shape (dim, ...) and the rates
    broadcast against ``y[0]``."""
    if kind is ModelKind.COMPARTMENTAL:
        S, I = y
        beta = tau * n
        infection = beta * I * S / N
        return np.stack([-infection, infection - gamma * I])
    if kind.is_pairwise:
        S, I, SI, SS = y
        if np.any(S <= 0):
            raise SingularStateError("pairwise closure needs [S] > 0")
        kappa = (n - 1.0) / n if kind is ModelKind.PAIRWISE_NM1 else 1.0
        closed = tau * kappa * SI / S
        dS = -tau * SI
        return np.stack([
            dS,
            -dS - gamma * I,
            -(tau + gamma) * SI + closed * (SS - SI),
            -2.0 * closed * SS,
        ])
    theta, R = y
    psi_ratio = np.exp(n * (theta - 1.0))
    dtheta = -tau * theta + tau * phiS0 * psi_ratio + gamma * (1.0 - theta) + tau * phiR0
    infected = N - N * phiS0 * psi_ratio - R
    return np.stack([dtheta, gamma * infected])


def rhs(kind: ModelKind, state, params: EpidemicParams) -> np.ndarray:
    """Time derivative of ``state`` under ``params``."""
    kind = ModelKind.parse(kind)
    y = np.asarray(state, dtype=float)
    if y.shape != (kind.dim,):
        raise InvalidParameterError(f"{kind.value} state must have shape ({kind.dim},), got {y.shape}")
    extra = {}
    if kind is ModelKind.EBCM:
        extra = dict(phiS0=params.init.phiS0, phiR0=params.init.phiR0)
    return _rhs(kind, y, params.tau, params.gamma, params.n, params.N, **extra)


def susceptible(kind: ModelKind, states: np.ndarray, params: EpidemicParams) -> np.ndarray:
    """Susceptible count along ``states`` (shape (T, dim))."""
    states = np.asarray(states, dtype=float)
    if kind is ModelKind.EBCM:
        return params.N * params.init.phiS0 * np.exp(params.n * (states[..., 0] - 1.0))
    return states[..., 0]


def prevalence(kind: ModelKind, states: np.ndarray, params: EpidemicParams) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    if kind is ModelKind.EBCM:
        return params.N - susceptible(kind, states, params) - states[..., 1]
    return states[..., 1]
