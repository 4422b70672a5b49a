"""Parameter identifiability of (tau, n) in network mean-field SIR models."""

from .errors import *  # noqa: F401,F403
from .identifiability import (
    CurvePair,
    EpsilonSet,
    ReducedProfile,
    curve_pair,
    epsilon_solution_set,
    h_function,
    intersections,
    proposition_check,
    reduced_f,
    reduced_f_limits,
    solve_intersection,
)
from .integrator import IncidenceSeries, Trajectory, daily_incidence, final_size_from_trajectory, integrate
from .models import EpidemicParams, ModelKind, default_initial_conditions, rhs
from .observables import (
    Observables,
    compute_observables,
    final_size_implicit,
    leading_eigenvalue,
    solve_tau_gamma,
    tau_on_eigenvalue_curve,
    tau_on_finalsize_curve,
    tau_on_finalsize_curve_kappa1_general,
)
from .surface import DistanceSurface, distance_surface, trajectory_distance

__version__ = "0.1.0"
