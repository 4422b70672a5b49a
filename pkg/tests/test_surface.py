import numpy as np
import pytest

from epiident.errors import InvalidParameterError
from epiident.models import EpidemicParams, ModelKind
from epiident.surface import (
    distance_surface,
    distance_surface_on_grid,
    incidence_of,
    left_open_grid,
    strict_local_minima,
    trajectory_distance,
    valley_profile,
)

from conftest import GAMMA, MASTER_N, MASTER_TAU, N_POP


def test_distance_basics():
    assert trajectory_distance([1.0, 2.0], [1.0, 2.0], 10.0) == 0.0
    assert trajectory_distance([3.0, 0.0], [0.0, 4.0], 10.0) == pytest.approx(0.5)
    with pytest.raises(InvalidParameterError):
        trajectory_distance([1.0], [1.0, 2.0], 10.0)


def test_left_open_grid():
    g = left_open_grid(0.0, 1.2, 60)
    assert g[0] == pytest.approx(0.02) and g[-1] == 1.2 and len(g) == 60
    with pytest.raises(InvalidParameterError):
        left_open_grid(1.0, 1.0, 3)


def test_strict_local_minima():
    assert strict_local_minima([3, 1, 2, 2, 0, 5]) == [1, 4]
    assert strict_local_minima([1, 1, 1]) == []


def test_master_point_has_zero_distance(master_pairwise):
    surf = distance_surface_on_grid(master_pairwise, [MASTER_TAU, 0.3], [MASTER_N, 8.0], 365, threads=2)
    assert surf.D.shape == (2, 2)
    assert surf.D[0, 0] < 1e-6
    assert np.all(surf.D[[0, 1, 1], [1, 0, 1]] > 1e-3)


def test_batch_agrees_with_single_runs(master_pairwise):
    taus, ns = [0.12, 0.2], [5.0, 7.0]
    surf = distance_surface_on_grid(master_pairwise, taus, ns, 365, threads=1)
    ref = incidence_of(master_pairwise, 365)
    for i, tau in enumerate(taus):
        for j, n in enumerate(ns):
            p = EpidemicParams.seeded(ModelKind.PAIRWISE_NM1, tau, GAMMA, n, N_POP, 1.0)
            d = trajectory_distance(ref, incidence_of(p, 365), N_POP)
            assert surf.D[i, j] == pytest.approx(d, rel=1e-4, abs=1e-7)


def test_thread_count_does_not_change_result(master_pairwise):
    a = distance_surface(master_pairwise, (0.0, 0.4), (3.0, 8.0), (3, 3), 365, threads=1)
    b = distance_surface(master_pairwise, (0.0, 0.4), (3.0, 8.0), (3, 3), 365, threads=3)
    assert np.array_equal(a.D, b.D)


def test_short_horizon_rejected(master_pairwise):
    with pytest.raises(InvalidParameterError):
        distance_surface_on_grid(master_pairwise, [0.1, 0.2], [5.0, 6.0], 30)


def test_valley_profile_follows_finalsize_curve(master_pairwise):
    from epiident.observables import observables_of, tau_on_finalsize_curve

    s = observables_of(master_pairwise).s_inf
    surf = distance_surface(master_pairwise, (0.0, 1.2), (2.0, 10.0), (12, 8), 365, threads=2)
    prof = valley_profile(surf, s)
    assert len(prof.n) > 0
    for n, tau in zip(prof.n, prof.tau):
        assert tau == pytest.approx(tau_on_finalsize_curve(ModelKind.PAIRWISE_NM1, s, GAMMA, n))
    assert np.all(prof.D <= surf.max)
