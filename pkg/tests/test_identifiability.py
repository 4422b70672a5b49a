import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epiident.errors import DomainError, NoIntersectionError, StructuralUnidentifiabilityError
from epiident.identifiability import (
    curve_pair,
    epsilon_solution_set,
    h_derivatives_at_one,
    h_function,
    intersection_sensitivity,
    intersections,
    proposition_check,
    q_value,
    reduced_f,
    reduced_f_limits,
    reduced_profile,
    solve_intersection,
)
from epiident.models import ModelKind
from epiident.observables import compute_observables, tau_on_finalsize_curve

from conftest import GAMMA, MASTER_N, MASTER_TAU

PW = ModelKind.PAIRWISE_NM1


def _pairwise_f_direct(n, s):
    a, b = s ** (1 / n), s ** (2 / n)
    return (a - b) / (b - s) * (n - 2)


def test_pairwise_f_matches_direct_formula():
    for s in (0.2, 0.5, 0.9):
        for n in (2.5, 4.0, 10.0, 50.0):
            assert reduced_f(PW, n, s) == pytest.approx(_pairwise_f_direct(n, s), rel=1e-10)


def test_pairwise_limits_closed_form():
    s = 0.5
    f2, f_inf = reduced_f_limits(PW, s)
    assert f2 == pytest.approx(2 * (s - math.sqrt(s)) / (s * math.log(s)), rel=1e-14)
    assert f_inf == pytest.approx(math.log(s) / (s - 1), rel=1e-14)
    assert reduced_f(PW, 2 + 1e-7, s) == pytest.approx(f2, rel=1e-6)
    assert reduced_f(PW, 1e9, s) == pytest.approx(f_inf, rel=1e-6)
    assert reduced_f(PW, math.inf, s) == f_inf


def test_ebcm_f_closed_form():
    s, n = 0.9, 10.0
    q = math.log(s) / (s - 1)
    assert q_value(s) == pytest.approx(q, rel=1e-15)
    assert reduced_f(ModelKind.EBCM, n, s) == pytest.approx((n - 1) / (n - q), rel=1e-14)
    assert reduced_f(ModelKind.PAIRWISE_K1, n, s) == reduced_f(ModelKind.EBCM, n, s)


def test_domain_errors():
    with pytest.raises(DomainError):
        reduced_f(PW, 2.0, 0.5)
    with pytest.raises(DomainError):
        reduced_f(ModelKind.EBCM, 1.0, 0.5)
    with pytest.raises(DomainError):
        reduced_f(PW, 5.0, 1.0)


def test_compartmental_has_no_reduced_problem():
    obs = compute_observables(ModelKind.COMPARTMENTAL, MASTER_TAU, GAMMA, MASTER_N)
    with pytest.raises(StructuralUnidentifiabilityError):
        solve_intersection(ModelKind.COMPARTMENTAL, obs.lam, obs.s_inf, GAMMA)


@pytest.mark.parametrize("kind", [PW, ModelKind.PAIRWISE_K1, ModelKind.EBCM])
def test_round_trip(kind):
    obs = compute_observables(kind, MASTER_TAU, GAMMA, MASTER_N)
    n_star, tau_star = solve_intersection(kind, obs.lam, obs.s_inf, GAMMA)
    assert n_star == pytest.approx(MASTER_N, rel=1e-9)
    assert tau_star == pytest.approx(MASTER_TAU, rel=1e-9)


def test_ebcm_closed_form_intersection():
    # q (n-1)/(n-q) = t  =>  n = q (t-1) / (t-q) with t the target
    s, lam, gamma = 0.6, 0.3, 0.2
    q = q_value(s)
    t = (lam + gamma) / gamma
    n_exact = q * (t - 1) / (t - q)
    n_star, tau_star = solve_intersection(ModelKind.EBCM, lam, s, gamma)
    assert n_star == pytest.approx(n_exact, rel=1e-10)
    assert tau_star == pytest.approx((lam + gamma) / (n_exact - 1), rel=1e-10)


def test_no_intersection_outside_range():
    s = 0.9
    _, f_inf = reduced_f_limits(PW, s)
    lam = GAMMA * (f_inf * 1.01 - 1)
    with pytest.raises(NoIntersectionError):
        solve_intersection(PW, lam, s, GAMMA)


def test_non_monotone_regime_lists_both_crossings():
    obs = compute_observables(PW, MASTER_TAU, GAMMA, MASTER_N)
    found = intersections(PW, obs.lam * 1.01, obs.s_inf, GAMMA)
    assert len(found) == 2
    assert found[0][0] < found[1][0]
    for n, _ in found:
        assert GAMMA * reduced_f(PW, n, obs.s_inf) == pytest.approx(obs.lam * 1.01 + GAMMA, rel=1e-12)


def test_sensitivity_is_large():
    obs = compute_observables(PW, 0.3, 1.0, 6.0)
    n_star, _ = solve_intersection(PW, obs.lam, obs.s_inf, 1.0)
    sens = intersection_sensitivity(PW, n_star, obs.s_inf)
    h = 1e-6
    slope = (reduced_f(PW, n_star + h, obs.s_inf) - reduced_f(PW, n_star - h, obs.s_inf)) / (2 * h)
    assert sens == pytest.approx(1 / abs(slope), rel=1e-4)
    assert sens > 10


def test_curve_pair_marks_domain_with_nan():
    obs = compute_observables(PW, MASTER_TAU, GAMMA, MASTER_N)
    pair = curve_pair(PW, obs.lam, obs.s_inf, GAMMA, [1.5, 2.0, 6.0])
    assert math.isnan(pair.tau_s[0]) and math.isnan(pair.tau_s[1])
    assert math.isnan(pair.tau_lambda[1])
    assert pair.tau_lambda[2] == pytest.approx(MASTER_TAU, rel=1e-12)


def test_reduced_profile_fields():
    prof = reduced_profile(ModelKind.EBCM, 0.9, [5.0, 10.0])
    assert prof.f_inf == 1.0 and prof.q == q_value(0.9)
    prof = reduced_profile(PW, 0.9, [5.0, 10.0])
    assert (prof.f2, prof.f_inf) == reduced_f_limits(PW, 0.9)


def _master_at(s_target, n=6.0, gamma=GAMMA):
    tau = tau_on_finalsize_curve(PW, s_target, gamma, n)
    lam = tau * (n - 2) - gamma
    return lam, tau


def test_epsilon_set_half_line():
    lam, _ = _master_at(0.9)
    es = epsilon_solution_set(PW, lam, 0.9, GAMMA, 0.03)
    assert es.infinite_measure
    assert es.intervals[-1][1] == math.inf
    assert 1000.0 in es and 1e9 in es


def test_epsilon_set_bounded():
    lam, _ = _master_at(0.9)
    es = epsilon_solution_set(PW, lam, 0.9, GAMMA, 0.001)
    assert not es.infinite_measure
    assert len(es.intervals) == 1
    lo, hi = es.intervals[0]
    assert lo < 6.0 < hi


@pytest.mark.parametrize("eps", [0.001, 0.005, 0.03])
def test_epsilon_set_membership_by_sampling(eps):
    s = 0.9
    lam, _ = _master_at(s)
    es = epsilon_solution_set(PW, lam, s, GAMMA, eps)
    f_star = reduced_f(PW, es.n_star, s)
    rng = np.random.default_rng(7)
    ns = 2.0 + np.exp(rng.uniform(math.log(1e-3), math.log(1e4), 1000))
    for n in ns:
        near = abs(reduced_f(PW, n, s) - f_star) < eps
        edge = any(abs(n - b) < 1e-9 * max(1.0, b) for iv in es.intervals for b in iv)
        if not edge:
            assert (n in es) == near


def test_h_at_one_and_positive_near_one():
    for n in (3.0, 6.0, 10.0):
        assert h_function(1.0, n) == 0.0
        assert all(h_function(b, n) > 0 for b in 0.95 + 1e-3 * np.arange(50))


@pytest.mark.parametrize("n", [3.0, 6.0, 10.0])
def test_h_derivatives_against_symbolic(n):
    # symbolic expansion at b=1: h' = h'' = 0, h''' = -3 (n-2)^2
    d1, d2, d3 = h_derivatives_at_one(n)
    assert abs(d1) < 1e-6
    assert abs(d2) < 1e-6
    assert d3 == pytest.approx(-3 * (n - 2) ** 2, rel=1e-3)


@settings(max_examples=40, deadline=None)
@given(s=st.floats(0.1, 0.95), n=st.floats(2.05, 400.0))
def test_f_inside_open_range(s, n):
    f2, f_inf = reduced_f_limits(PW, s)
    f = reduced_f(PW, n, s)
    assert f2 < f < f_inf


def test_proposition_on_grid():
    s_grid = np.round(np.arange(0.1, 0.951, 0.05), 12)
    rep = proposition_check(s_grid, np.geomspace(2.01, 500, 200))
    assert rep.holds.all() and not rep.failures
    assert rep.smallest_passing == pytest.approx(0.1)


def test_proposition_fails_for_huge_epidemics():
    rep = proposition_check([0.01, 0.5], np.geomspace(2.01, 500, 200))
    assert list(rep.increasing) == [False, True]
    assert rep.smallest_passing == pytest.approx(0.5)
