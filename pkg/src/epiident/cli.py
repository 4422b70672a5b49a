"""Command-line entry point: ``epiident <subcommand> ...``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 structural unidentifiability.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import identifiability as ident
from .csvio import fmt, write_rows
from .errors import (
    EpiIdentError,
    InvalidParameterError,
    NoIntersectionError,
    NumericalError,
    StructuralUnidentifiabilityError,
)
from .integrator import DEFAULT_T_END, _steps_per_day, final_size_from_trajectory, integrate
from .models import EpidemicParams, ModelKind, state_columns
from .observables import (
    compute_observables,
    observables_of,
    solve_tau_gamma,
)
from .surface import distance_surface

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_STRUCTURAL = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _positive(x: str) -> float:
    v = float(x)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {x}")
    return v


def _nonneg(x: str) -> float:
    v = float(x)
    if not v >= 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {x}")
    return v


def _model_arg(p, default=None):
    p.add_argument("--model", required=default is None, default=default,
                   choices=[k.value for k in ModelKind])


def _rates_args(p, required_gamma=True):
    p.add_argument("--tau", type=_nonneg)
    p.add_argument("--n", type=_positive)
    p.add_argument("--gamma", type=_positive, required=required_gamma)


def _population_args(p):
    p.add_argument("--N", type=_positive, default=10000.0)
    p.add_argument("--i0", type=_positive, default=1.0)


def _grid(lo, hi, count, scale):
    if count < 1 or hi < lo:
        raise InvalidParameterError("grid needs count >= 1 and max >= min")
    if scale == "log":
        if lo <= 0:
            raise InvalidParameterError("log grid needs a positive minimum")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def _grid_args(p, prefix, lo, hi, count):
    p.add_argument(f"--{prefix}-min", type=float, default=lo)
    p.add_argument(f"--{prefix}-max", type=float, default=hi)
    p.add_argument(f"--{prefix}-count", type=int, default=count)
    p.add_argument(f"--{prefix}-scale", choices=["linear", "log"], default="linear")


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def _master(args) -> EpidemicParams:
    if args.tau is None or args.n is None:
        raise InvalidParameterError("--tau and --n are required")
    return EpidemicParams.seeded(args.model, args.tau, args.gamma, args.n, args.N, args.i0)


def _observed(args, kind):
    """(lambda, s_inf) from flags, either directly or from a master (tau, n)."""
    if args.lam is not None or args.s_inf is not None:
        if args.lam is None or args.s_inf is None:
            raise InvalidParameterError("--lambda and --s-inf must be given together")
        return args.lam, args.s_inf
    if args.tau is None or args.n is None:
        raise InvalidParameterError("give either --lambda/--s-inf or a master --tau/--n")
    obs = compute_observables(kind, args.tau, args.gamma, args.n)
    return obs.lam, obs.s_inf


def cmd_simulate(args) -> int:
    params = _master(args)
    kind = params.kind
    k = _steps_per_day(args.dt_out)
    traj = integrate(kind, params, args.t_end, args.dt_out, args.rtol, args.atol)
    C = traj.cumulative
    daily = C - C[np.maximum(np.arange(len(C)) - k, 0)]
    prev = traj.prevalence
    header = ["t", *state_columns(kind), "prevalence", "cumulative", "daily_cases"]
    rows = (
        [traj.times[i], *traj.states[i], prev[i], C[i], daily[i]] for i in range(len(traj.times))
    )
    with _output(args.output) as out:
        write_rows(out, header, rows)
    return EXIT_OK


def cmd_observables(args) -> int:
    params = _master(args)
    obs = observables_of(params)
    print(f"lambda={fmt(obs.lam)}")
    print(f"s_inf={fmt(obs.s_inf)}")
    print(f"r_inf={fmt(obs.r_inf)}")
    if obs.subcritical:
        print("warning: lambda <= 0, no major outbreak; final size is trivial", file=sys.stderr)
    if args.verify_ode:
        traj = integrate(params.kind, params, args.t_end, 1.0, args.rtol, args.atol)
        s_ode = final_size_from_trajectory(traj)
        print(f"s_inf_ode={fmt(s_ode)}")
        print(f"difference={fmt(abs(s_ode - obs.s_inf))}")
    return EXIT_OK


def cmd_curves(args) -> int:
    kind = ModelKind.parse(args.model)
    lam, s_inf = _observed(args, kind)
    ns = _grid(args.n_min, args.n_max, args.n_count, args.n_scale)
    pair = ident.curve_pair(kind, lam, s_inf, args.gamma, ns)
    comments = [f"model={kind.value}, lambda={fmt(lam)}, s_inf={fmt(s_inf)}, gamma={fmt(args.gamma)}"]
    if kind is ModelKind.COMPARTMENTAL:
        comments.append("no_intersection (compartmental curves coincide: only tau*n is determined)")
    else:
        try:
            n_star, tau_star = ident.solve_intersection(kind, lam, s_inf, args.gamma)
            comments.append(f"n_star={fmt(n_star)}, tau_star={fmt(tau_star)}")
        except NoIntersectionError:
            comments.append("no_intersection")
    rows = []
    for n, tl, ts in zip(pair.n_grid, pair.tau_lambda, pair.tau_s):
        if math.isnan(tl) and math.isnan(ts):
            rows.append(f"omitted n={fmt(n)}: outside both curves' domains")
        else:
            rows.append([n, tl, ts])
    with _output(args.output) as out:
        write_rows(out, ["n", "tau_eigenvalue", "tau_finalsize"], rows, comments)
    return EXIT_OK


def cmd_surface(args) -> int:
    master = _master(args)
    surf = distance_surface(
        master, (args.tau_min, args.tau_max), (args.n_min, args.n_max),
        (args.tau_count, args.n_count), args.horizon, args.rtol, args.atol, args.threads,
    )
    rows = (
        [surf.tau_grid[i], surf.n_grid[j], surf.D[i, j]]
        for j in range(len(surf.n_grid)) for i in range(len(surf.tau_grid))
    )
    with _output(args.output) as out:
        write_rows(out, ["tau", "n", "D"], rows)
    return EXIT_OK


def _interval_text(intervals) -> str:
    if not intervals:
        return "{}"
    return " U ".join(f"({fmt(a)}, {fmt(b)})" for a, b in intervals)


def cmd_ident_report(args) -> int:
    kind = ModelKind.parse(args.model)
    if kind is ModelKind.COMPARTMENTAL:
        raise StructuralUnidentifiabilityError(
            "compartmental model is structurally unidentifiable: lambda and s_inf fix only the product tau*n"
        )
    lam, s_inf = _observed(args, kind)
    n_star, tau_star = ident.solve_intersection(kind, lam, s_inf, args.gamma)
    others = ident.intersections(kind, lam, s_inf, args.gamma)[1:]
    print(f"model={kind.value}")
    print(f"lambda={fmt(lam)} s_inf={fmt(s_inf)} gamma={fmt(args.gamma)}")
    print(f"n_star={fmt(n_star)} tau_star={fmt(tau_star)}")
    for n_o, tau_o in others:
        print(f"additional_intersection n={fmt(n_o)} tau={fmt(tau_o)}")
    lo, hi = ident.reduced_f_limits(kind, s_inf)
    if kind is ModelKind.PAIRWISE_NM1:
        print(f"f2={fmt(lo)} f_inf={fmt(hi)} range_width={fmt(hi - lo)}")
    else:
        print(f"q={fmt(ident.q_value(s_inf))} f_limit_inf={fmt(lo)} f_limit_at_q={fmt(hi)}")
    print(f"f_star={fmt(ident.reduced_f(kind, n_star, s_inf))}")
    print(f"sensitivity_dn_df={fmt(ident.intersection_sensitivity(kind, n_star, s_inf))}")
    for eps in args.epsilon or []:
        es = ident.epsilon_solution_set(kind, lam, s_inf, args.gamma, eps)
        verdict = "weakly-unidentifiable" if es.infinite_measure else "bounded"
        print(f"epsilon={fmt(eps)} set={_interval_text(es.intervals)} "
              f"infinite_measure={str(es.infinite_measure).lower()} verdict={verdict}")
    if args.f_profile:
        lower = 2.0 if kind is ModelKind.PAIRWISE_NM1 else ident.q_value(s_inf)
        ns = _grid(args.n_min, args.n_max, args.n_count, args.n_scale)
        rows = []
        for n in ns:
            rows.append([n, ident.reduced_f(kind, n, s_inf)] if n > lower else f"omitted n={fmt(n)}: outside domain")
        with _output(args.f_profile) as out:
            write_rows(out, ["n", "f"], rows)
    return EXIT_OK


def cmd_solve_rates(args) -> int:
    tau, gamma = solve_tau_gamma(args.model, args.n, args.lam, args.s_inf, args.phi_s0)
    print(f"tau={fmt(tau)}")
    print(f"gamma={fmt(gamma)}")
    return EXIT_OK


def cmd_proposition_check(args) -> int:
    s_grid = np.round(np.arange(args.s_min, args.s_max + 0.5 * args.s_step, args.s_step), 12)
    ns = _grid(args.n_min, args.n_max, args.n_count, "log")
    report = ident.proposition_check(s_grid, ns)
    for s, inc, bnd, f2, fi in zip(report.s_grid, report.increasing, report.bounded, report.f2, report.f_inf):
        print(f"s_inf={fmt(float(s))} increasing={str(bool(inc)).lower()} bounded={str(bool(bnd)).lower()} "
              f"f2={fmt(f2)} f_inf={fmt(fi)}")
    print(f"smallest_passing_s_inf={fmt(report.smallest_passing)}")
    for n in args.h_degree:
        h1, h2, h3 = ident.h_derivatives_at_one(n)
        bs = 0.95 + 1e-3 * np.arange(50)
        positive = all(ident.h_function(b, n) > 0 for b in bs)
        print(f"h n={fmt(n)} h(1)={fmt(ident.h_function(1.0, n))} h1={fmt(h1)} h2={fmt(h2)} h3={fmt(h3)} "
              f"positive_on_[0.95,1)={str(positive).lower()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epiident", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="integrate a model and write a trajectory CSV")
    _model_arg(p)
    _rates_args(p)
    _population_args(p)
    p.add_argument("--t-end", type=_positive, default=DEFAULT_T_END)
    p.add_argument("--dt-out", type=_positive, default=1.0)
    p.add_argument("--rtol", type=_positive, default=1e-8)
    p.add_argument("--atol", type=_positive, default=1e-8)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("observables", help="leading eigenvalue and final size")
    _model_arg(p)
    _rates_args(p)
    _population_args(p)
    p.add_argument("--verify-ode", action="store_true")
    p.add_argument("--t-end", type=_positive, default=DEFAULT_T_END)
    p.add_argument("--rtol", type=_positive, default=1e-8)
    p.add_argument("--atol", type=_positive, default=1e-8)
    p.set_defaults(func=cmd_observables)

    for name, func, help_ in (
        ("curves", cmd_curves, "eigenvalue and final-size curves tau(n)"),
        ("ident-report", cmd_ident_report, "intersection, limits and epsilon-sets"),
    ):
        p = sub.add_parser(name, help=help_)
        _model_arg(p)
        _rates_args(p)
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--s-inf", type=float)
        _grid_args(p, "n", 2.5, 20.0, 200)
        if name == "curves":
            p.add_argument("--output", "-o")
        else:
            p.add_argument("--epsilon", type=_positive, action="append")
            p.add_argument("--f-profile")
        p.set_defaults(func=func)

    p = sub.add_parser("surface", help="distance surface D(tau, n) against a master run")
    _model_arg(p)
    _rates_args(p)
    _population_args(p)
    _grid_args(p, "tau", 0.0, 1.2, 60)
    _grid_args(p, "n", 2.0, 10.0, 60)
    p.add_argument("--horizon", type=int, default=365)
    p.add_argument("--threads", type=int)
    p.add_argument("--rtol", type=_positive, default=1e-8)
    p.add_argument("--atol", type=_positive, default=1e-8)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("solve-rates", help="recover (tau, gamma) at known n")
    _model_arg(p)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--s-inf", type=float, required=True)
    p.add_argument("--phi-s0", type=_positive, default=1.0)
    p.set_defaults(func=cmd_solve_rates)

    p = sub.add_parser("proposition-check", help="monotonicity and range of the pairwise f")
    p.add_argument("--s-min", type=_positive, default=0.1)
    p.add_argument("--s-max", type=_positive, default=0.95)
    p.add_argument("--s-step", type=_positive, default=0.05)
    p.add_argument("--n-min", type=_positive, default=2.01)
    p.add_argument("--n-max", type=_positive, default=500.0)
    p.add_argument("--n-count", type=int, default=200)
    p.add_argument("--h-degree", type=float, action="append")
    p.set_defaults(func=cmd_proposition_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "h_degree", "unset") is None:
        args.h_degree = [3.0, 6.0, 10.0]
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK
    except StructuralUnidentifiabilityError as exc:
        print(f"epiident: structural unidentifiability: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except InvalidParameterError as exc:
        print(f"epiident: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"epiident: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EpiIdentError as exc:
        print(f"epiident: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
