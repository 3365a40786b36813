from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptgain.controller import G1, G2, ControllerSpec, Family
from adaptgain.dynamics import (
    ControlledSystem,
    Stability,
    SystemState,
    classify_eigenvalues,
    find_equilibria,
    jacobian,
    replicator_stability,
    vector_field,
)
from adaptgain.game import MINORITY_GAME, PRISONERS_DILEMMA, PURE_COORDINATION, PayoffMatrix, Variant, game_from_constants

shares = st.floats(min_value=0.0, max_value=1.0)
gains = st.floats(min_value=0.0, max_value=50.0)
consts = st.floats(min_value=0.1, max_value=3.0)
entries = st.floats(min_value=-5.0, max_value=5.0)


def random_system(rng: np.random.Generator) -> ControlledSystem:
    m = PayoffMatrix(*rng.uniform(-3, 3, 4))
    matrix = (G1, G2)[rng.integers(2)]
    family = (Family.PHI1, Family.PHI2)[rng.integers(2)]
    h = rng.uniform(1.0, 3.0) if family is Family.PHI2 else rng.uniform(0.05, 0.95)
    return ControlledSystem(m, ControllerSpec(matrix, family, rng.uniform(0.1, 3.0), h, 0.5))


def test_vector_field_example(coord_sys):
    dx, dg = vector_field(coord_sys, SystemState(0.6, 1.0))
    assert dx == pytest.approx(-0.096, abs=1e-15)
    assert dg == pytest.approx(0.2, abs=1e-15)


def test_mixed_equilibrium_of_minority_game_is_rest_point():
    assert vector_field(ControlledSystem(MINORITY_GAME), SystemState(0.5, 0.0))[0] == 0.0


def test_vector_field_rejects_states_outside_domain(coord_sys):
    with pytest.raises(ValueError):
        SystemState(1.2, 0.0)
    with pytest.raises(ValueError):
        SystemState(0.5, -1.0)


@given(entries, entries, entries, entries, gains,
       st.sampled_from([G1, G2]), st.sampled_from([Family.PHI1, Family.PHI2]))
def test_boundaries_are_invariant(a, b, c, d, g, matrix, family):
    sys = ControlledSystem(PayoffMatrix(a, b, c, d), ControllerSpec(matrix, family, 1.0, 0.5, 1.0))
    assert vector_field(sys, SystemState(0.0, g))[0] == 0.0
    assert vector_field(sys, SystemState(1.0, g))[0] == 0.0


def test_specialized_forms_agree_with_general_field():
    grid = [(x, g) for x in np.linspace(0, 1, 10) for g in np.linspace(0, 4.5, 10)]
    k, h = 1.3, 0.35
    for alpha, beta in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)]:
        coord = ControlledSystem(game_from_constants(Variant.COORDINATION, alpha, beta),
                                 ControllerSpec(G1, Family.PHI1, k, h, 1.0))
        dom = ControlledSystem(game_from_constants(Variant.DOMINANT_ACTION1, alpha, beta),
                               ControllerSpec(G2, Family.PHI2, k, 2.0, 1.0))
        anti = ControlledSystem(game_from_constants(Variant.ANTI_COORDINATION, alpha, beta),
                                ControllerSpec(G2, Family.PHI2, k, 2.0, 1.0))
        for x, g in grid:
            s = SystemState(float(x), float(g))
            q = x * (1 - x)
            expected = {
                coord: (q * ((alpha + beta) * x - beta - g * x), k * (x - h) * g),
                dom: (q * (alpha * x + (beta - g) * (1 - x)), k * x**2 * g),
                anti: (q * (beta - (alpha + beta) * x - g * (1 - x)), k * x**2 * g),
            }
            for sys, (ex, eg) in expected.items():
                dx, dg = vector_field(sys, s)
                assert dx == pytest.approx(ex, abs=1e-12)
                assert dg == pytest.approx(eg, abs=1e-12)


def test_jacobian_examples(coord_sys):
    np.testing.assert_allclose(jacobian(coord_sys, SystemState(0.0, 0.0)), np.diag([-1.0, -0.4]), atol=1e-15)
    eig = np.sort(np.linalg.eigvals(jacobian(coord_sys, SystemState(1.0, 0.0))).real)
    np.testing.assert_allclose(eig, [-1.0, 0.6], atol=1e-15)


def _fd_jacobian(sys, x, g, step=1e-6):
    cols = []
    for dx, dg in ((step, 0.0), (0.0, step)):
        plus = np.array(vector_field(sys, SystemState(x + dx, g + dg)))
        minus = np.array(vector_field(sys, SystemState(x - dx, g - dg)))
        cols.append((plus - minus) / (2 * step))
    return np.column_stack(cols)


def test_jacobian_matches_central_differences(rng):
    for _ in range(100):
        sys = random_system(rng)
        x, g = rng.uniform(0.01, 0.99), rng.uniform(0.01, 5.0)
        analytic = jacobian(sys, SystemState(x, g))
        numeric = _fd_jacobian(sys, x, g)
        scale = max(1.0, np.abs(analytic).max())
        assert np.abs(analytic - numeric).max() / scale < 1e-5


def test_equilibria_of_coordination_controller(coord_sys):
    reports = find_equilibria(coord_sys)
    got = {(r.point.x, r.point.g): r.stability for r in reports}
    assert got == {
        (0.0, 0.0): Stability.STABLE_NODE,
        (0.5, 0.0): Stability.SOURCE,
        (1.0, 0.0): Stability.SADDLE,
    }


def test_equilibria_of_uncontrolled_coordination():
    xs = [r.point.x for r in find_equilibria(ControlledSystem(PURE_COORDINATION))]
    assert xs == [0.0, 0.5, 1.0]


def test_phi2_reports_equilibrium_ray():
    sys = ControlledSystem(PRISONERS_DILEMMA, ControllerSpec(G2, Family.PHI2, 2.0, 1.0, 0.2))
    rays = [r for r in find_equilibria(sys) if r.ray]
    assert len(rays) == 1 and rays[0].point.x == 0.0
    assert rays[0].stability is Stability.NON_HYPERBOLIC
    for g in (0.0, 0.7, 3.0, 1e4):
        assert vector_field(sys, SystemState(0.0, g)) == (0.0, 0.0)


def test_phi1_interior_equilibrium_when_gain_balances():
    # anti-coordination under G2 with phi1: x = h is a rest point at positive gain
    sys = ControlledSystem(MINORITY_GAME, ControllerSpec(G2, Family.PHI1, 1.0, 0.25, 1.0))
    interior = [r for r in find_equilibria(sys) if r.point.g > 0]
    assert len(interior) == 1
    dx, dg = vector_field(sys, interior[0].point)
    assert interior[0].point.x == 0.25
    assert abs(dx) < 1e-15 and abs(dg) < 1e-15


def test_classify_eigenvalues():
    assert classify_eigenvalues([-1, -2]) is Stability.STABLE_NODE
    assert classify_eigenvalues([1, 2]) is Stability.SOURCE
    assert classify_eigenvalues([-1, 2]) is Stability.SADDLE
    assert classify_eigenvalues([-1, 1e-12]) is Stability.NON_HYPERBOLIC


def test_replicator_stability_matches_evolutionary_stability():
    assert replicator_stability(PURE_COORDINATION) == [(0.0, True), (0.5, False), (1.0, True)]
    assert replicator_stability(MINORITY_GAME) == [(0.0, False), (0.5, True), (1.0, False)]
    assert replicator_stability(PRISONERS_DILEMMA) == [(0.0, False), (1.0, True)]


@given(entries, entries, entries, entries, shares)
def test_relabel_antisymmetry(a, b, c, d, x):
    m = PayoffMatrix(a, b, c, d)
    f = vector_field(ControlledSystem(m), SystemState(x, 0.0))[0]
    f_swapped = vector_field(ControlledSystem(m.relabel()), SystemState(1.0 - x, 0.0))[0]
    assert f_swapped == pytest.approx(-f, abs=1e-12)


@given(entries, entries, entries, entries, shares, gains, consts, consts)
def test_gain_nondecreasing_under_phi2(a, b, c, d, x, g, k, h):
    sys = ControlledSystem(PayoffMatrix(a, b, c, d), ControllerSpec(G2, Family.PHI2, k, h, 1.0))
    assert vector_field(sys, SystemState(x, g))[1] >= 0.0
