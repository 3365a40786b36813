from __future__ import annotations

import numpy as np
import pytest

from adaptgain.abm import (
    MEAN_FIELD_CASES,
    AbmConfig,
    RateScaleError,
    compare_to_ode,
    max_payoff_difference,
    median_deviation,
    run_mean_field_suite,
    simulate_abm,
)
from adaptgain.controller import G2, ControllerSpec, Family
from adaptgain.dynamics import ControlledSystem
from adaptgain.game import MINORITY_GAME, PRISONERS_DILEMMA, PURE_COORDINATION, PayoffMatrix

MINORITY = ControlledSystem(MINORITY_GAME)
COORD = ControlledSystem(PURE_COORDINATION)


@pytest.mark.parametrize("x0", [0.0, 1.0])
def test_boundaries_absorb(x0):
    traj = simulate_abm(MINORITY, x0, AbmConfig(population=500, seed=1), 5.0)
    assert np.all(traj.x == x0)


def test_minority_population_settles_at_mixed_equilibrium():
    traj = simulate_abm(MINORITY, 0.95, AbmConfig(population=10_000, seed=0), 10.0)
    assert abs(traj.x[-1] - 0.5) < 0.03


def test_same_seed_same_run():
    cfg = AbmConfig(population=300, seed=42)
    a = simulate_abm(MINORITY, 0.7, cfg, 5.0)
    b = simulate_abm(MINORITY, 0.7, cfg, 5.0)
    assert np.array_equal(a.x, b.x) and a.meta["events"] == b.meta["events"]
    c = simulate_abm(MINORITY, 0.7, AbmConfig(population=300, seed=43), 5.0)
    assert not np.array_equal(a.x, c.x)


def test_shares_are_multiples_of_inverse_population():
    n = 137
    traj = simulate_abm(COORD, 0.6, AbmConfig(population=n, seed=3), 5.0)
    counts = traj.meta["counts"]
    assert np.array_equal(traj.x, counts / n)
    assert np.all((counts >= 0) & (counts <= n))


def test_record_grid():
    traj = simulate_abm(COORD, 0.6, AbmConfig(population=100, seed=3, record_dt=0.5), 5.0)
    np.testing.assert_allclose(traj.times, np.arange(0, 5.01, 0.5))


def test_deviation_is_zero_on_absorbing_state():
    report = compare_to_ode(COORD, 0.0, AbmConfig(population=1000, seed=0), 10.0)
    assert report.sup_norm == 0.0 and not report.absorbed


def test_coordination_tracks_ode_at_large_population():
    assert compare_to_ode(COORD, 0.8, AbmConfig(population=10_000, seed=0), 10.0).sup_norm < 0.05


def test_rejects_insufficient_rate_scale():
    big = ControlledSystem(PayoffMatrix(0, 3, 1, 0))
    assert max_payoff_difference(big) == 3.0
    with pytest.raises(RateScaleError):
        simulate_abm(big, 0.5, AbmConfig(population=100, rate_scale=1.0), 1.0)
    simulate_abm(big, 0.5, AbmConfig(population=100, rate_scale=3.0), 1.0)


def test_rejects_rate_scale_overrun_by_growing_gain():
    sys = ControlledSystem(PRISONERS_DILEMMA, ControllerSpec(G2, Family.PHI2, 2.0, 1.0, 0.2))
    with pytest.raises(RateScaleError):
        simulate_abm(sys, 0.5, AbmConfig(population=2000, rate_scale=1.5), 10.0)


def test_controlled_gain_follows_empirical_share():
    sys = ControlledSystem(MINORITY_GAME, ControllerSpec(G2, Family.PHI2, 0.1, 1.0, 0.1))
    traj = simulate_abm(sys, 0.99, AbmConfig(population=2000, seed=2, rate_scale=2.5), 20.0)
    assert np.all(np.diff(traj.g) >= 0) and traj.g[-1] > traj.g[0]


def test_config_validation():
    with pytest.raises(ValueError):
        AbmConfig(population=1)
    with pytest.raises(ValueError):
        AbmConfig(rate_scale=0.0)


def test_larger_population_tracks_ode_more_closely():
    small = median_deviation(COORD, 0.8, 100, range(5), 10.0)
    large = median_deviation(COORD, 0.8, 10_000, range(5), 10.0)
    assert large < small


@pytest.mark.slow
def test_mean_field_suite_covers_all_example_games():
    assert {name for name, _, _ in MEAN_FIELD_CASES} == {"minority", "pure-coordination", "prisoners-dilemma"}
    report = run_mean_field_suite()
    assert report.passed, report.failures
