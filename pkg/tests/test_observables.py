import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epiident.errors import (
    DegenerateCurveError,
    DomainError,
    InvalidParameterError,
    RootBracketError,
    UnidentifiablePairError,
)
from epiident.models import ModelKind
from epiident.observables import (
    compute_observables,
    final_size_implicit,
    leading_eigenvalue,
    solve_tau_gamma,
    tau_on_eigenvalue_curve,
    tau_on_finalsize_curve,
    tau_on_finalsize_curve_kappa1_general,
)

from conftest import GAMMA, MASTER_N, MASTER_TAU


@pytest.mark.parametrize(
    "kind, l",
    [
        (ModelKind.COMPARTMENTAL, 6.0),
        (ModelKind.PAIRWISE_NM1, 4.0),
        (ModelKind.PAIRWISE_K1, 5.0),
        (ModelKind.EBCM, 5.0),
    ],
)
def test_eigenvalue_degree_factor(kind, l):
    assert leading_eigenvalue(kind, 0.2, 0.1, 6.0) == pytest.approx(0.2 * l - 0.1, abs=1e-15)


def test_compartmental_r0_two():
    # s = exp(-2 (1 - s)), solved independently by fixed-point iteration
    s = 0.5
    for _ in range(200):
        s = math.exp(-2 * (1 - s))
    assert final_size_implicit(ModelKind.COMPARTMENTAL, 0.2, 0.1, 1.0) == pytest.approx(s, abs=1e-12)
    assert s == pytest.approx(0.203188, abs=1e-6)


def test_subcritical_is_trivial():
    obs = compute_observables(ModelKind.PAIRWISE_NM1, 0.01, 0.1, 6.0)
    assert obs.subcritical and obs.s_inf == 1.0 and obs.r_inf == 0.0


def test_root_satisfies_relation(kind):
    s = final_size_implicit(kind, MASTER_TAU, GAMMA, MASTER_N)
    if kind is ModelKind.COMPARTMENTAL:
        res = MASTER_TAU * MASTER_N / GAMMA * (1 - s) + math.log(s)
    elif kind is ModelKind.PAIRWISE_NM1:
        res = MASTER_TAU * (s - s ** (2 / MASTER_N)) + GAMMA * (s ** (1 / MASTER_N) - s ** (2 / MASTER_N))
    else:
        res = MASTER_TAU * MASTER_N * s - (MASTER_TAU + GAMMA) * math.log(s) - MASTER_TAU * MASTER_N
    assert abs(res) < 1e-12
    assert 0 < s < 1


def test_kappa1_and_ebcm_final_sizes_agree():
    a = final_size_implicit(ModelKind.PAIRWISE_K1, 0.2, 0.3, 4.0)
    b = final_size_implicit(ModelKind.EBCM, 0.2, 0.3, 4.0)
    assert a == b


def test_large_reproduction_number():
    # R0 = 600: s = exp(-600 (1 - s)) to double precision
    s = final_size_implicit(ModelKind.COMPARTMENTAL, 6.0, 0.1, 10.0)
    assert s == pytest.approx(math.exp(-600), rel=1e-12)


def test_unrepresentable_final_size():
    with pytest.raises(RootBracketError):
        final_size_implicit(ModelKind.COMPARTMENTAL, 10.0, 0.1, 10.0)


def test_rejects_bad_rates():
    with pytest.raises(InvalidParameterError):
        leading_eigenvalue(ModelKind.EBCM, -0.1, 0.1, 4.0)
    with pytest.raises(InvalidParameterError):
        final_size_implicit(ModelKind.EBCM, 0.1, 0.1, 4.0, phiS0=1.5)


@settings(max_examples=60, deadline=None)
@given(
    kind=st.sampled_from([ModelKind.PAIRWISE_NM1, ModelKind.PAIRWISE_K1, ModelKind.EBCM]),
    tau=st.floats(0.05, 2.0),
    n=st.floats(3.0, 30.0),
    gamma=st.floats(0.05, 1.0),
)
def test_both_curves_pass_through_truth(kind, tau, n, gamma):
    lam = leading_eigenvalue(kind, tau, gamma, n)
    if lam <= 1e-3 * gamma:
        return
    s = final_size_implicit(kind, tau, gamma, n)
    if s < 1e-200:
        return
    assert tau_on_eigenvalue_curve(kind, lam, gamma, n) == pytest.approx(tau, rel=1e-12)
    assert tau_on_finalsize_curve(kind, s, gamma, n) == pytest.approx(tau, rel=1e-6)


def test_compartmental_curves_coincide():
    obs = compute_observables(ModelKind.COMPARTMENTAL, MASTER_TAU, GAMMA, MASTER_N)
    for n in np.linspace(1, 30, 17):
        tl = tau_on_eigenvalue_curve(ModelKind.COMPARTMENTAL, obs.lam, GAMMA, n)
        ts = tau_on_finalsize_curve(ModelKind.COMPARTMENTAL, obs.s_inf, GAMMA, n)
        assert ts == pytest.approx(tl, rel=1e-9)


def test_eigenvalue_curve_domain():
    with pytest.raises(DomainError):
        tau_on_eigenvalue_curve(ModelKind.PAIRWISE_NM1, 0.4, 0.1, 2.0)


def test_finalsize_curve_domain():
    with pytest.raises(DomainError):
        tau_on_finalsize_curve(ModelKind.PAIRWISE_NM1, 0.5, 0.1, 2.0)
    with pytest.raises(DomainError):
        tau_on_finalsize_curve(ModelKind.EBCM, 1.0, 0.1, 5.0)


def test_ebcm_curve_value():
    # gamma ln s / (n s - ln s - n) at s = 0.9, n = 10
    expected = (1 / 7) * math.log(0.9) / (10 * 0.9 - math.log(0.9) - 10)
    assert tau_on_finalsize_curve(ModelKind.EBCM, 0.9, 1 / 7, 10.0) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(0.0168241, abs=1e-7)


def test_ebcm_pole_is_degenerate():
    s = 0.5
    # n s - ln s - n = 0 at n = q
    q = math.log(s) / (s - 1)
    with pytest.raises(DegenerateCurveError):
        tau_on_finalsize_curve(ModelKind.EBCM, s, 0.1, q)


def test_kappa1_general_reduces_to_disease_free_form():
    N, n, s = 1e4, 6.0, 0.6
    S0 = N
    general = tau_on_finalsize_curve_kappa1_general(S0, n * N, 0.0, GAMMA, s * N)
    reduced = tau_on_finalsize_curve(ModelKind.PAIRWISE_K1, s, GAMMA, n)
    assert general == pytest.approx(reduced, rel=1e-12)


def test_kappa1_general_rejects_bad_count():
    with pytest.raises(DomainError):
        tau_on_finalsize_curve_kappa1_general(100.0, 600.0, 0.0, 0.1, 150.0)


def test_solve_tau_gamma_round_trip(kind):
    obs = compute_observables(kind, MASTER_TAU, GAMMA, MASTER_N)
    tau, gamma = solve_tau_gamma(kind, MASTER_N, obs.lam, obs.s_inf)
    assert tau == pytest.approx(MASTER_TAU, rel=1e-9)
    assert gamma == pytest.approx(GAMMA, rel=1e-9)


def test_solve_tau_gamma_compartmental_wrong_degree_scales():
    obs = compute_observables(ModelKind.COMPARTMENTAL, MASTER_TAU, GAMMA, MASTER_N)
    tau, gamma = solve_tau_gamma(ModelKind.COMPARTMENTAL, 2 * MASTER_N, obs.lam, obs.s_inf)
    assert tau == pytest.approx(MASTER_TAU / 2, rel=1e-12)
    assert gamma == pytest.approx(GAMMA, rel=1e-12)


def test_solve_tau_gamma_trivial_final_size():
    with pytest.raises(UnidentifiablePairError):
        solve_tau_gamma(ModelKind.PAIRWISE_NM1, 6.0, 0.1, 1.0)
