from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptgain.game import (
    MINORITY_GAME,
    PRISONERS_DILEMMA,
    PURE_COORDINATION,
    PayoffMatrix,
    Variant,
    classify,
    game_from_constants,
    mixed_ne,
    reward_vector,
)

entries = st.floats(min_value=-10, max_value=10, allow_nan=False).map(lambda v: round(v, 3))
matrices = st.builds(PayoffMatrix, entries, entries, entries, entries)
shares = st.floats(min_value=0.0, max_value=1.0)


def bisect_indifference(m: PayoffMatrix, lo: float = 0.0, hi: float = 1.0) -> float:
    def diff(x):
        r1, r2 = reward_vector(x, m)
        return r1 - r2

    f_lo = diff(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = diff(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize(
    "m, variant, alpha, beta, x_star",
    [
        (PURE_COORDINATION, Variant.COORDINATION, 1.0, 1.0, 0.5),
        (PRISONERS_DILEMMA, Variant.DOMINANT_ACTION1, 1.0, 1.0, None),
        (MINORITY_GAME, Variant.ANTI_COORDINATION, 1.0, 1.0, 0.5),
    ],
)
def test_classify_named_games(m, variant, alpha, beta, x_star):
    gc = classify(m)
    assert gc.variant is variant
    assert (gc.alpha, gc.beta) == (alpha, beta)
    assert gc.mixed_ne == x_star


def test_classify_degenerate_uses_exact_equality():
    assert classify(PayoffMatrix(1, 2, 1, 3)).variant is Variant.DEGENERATE
    assert classify(PayoffMatrix(1, 2, 0, 2)).variant is Variant.DEGENERATE
    assert classify(PayoffMatrix(1, 2, 1 - 1e-15, 3)).variant is not Variant.DEGENERATE


def test_dominant_action2():
    gc = classify(PayoffMatrix(0, 0, 1, 2))
    assert gc.variant is Variant.DOMINANT_ACTION2
    assert gc.nash_equilibria() == ["(2,2)"]


@pytest.mark.parametrize("m, expected", [((3, 0, 0, 1), 0.25), ((1, 0, 0, 1), 0.5), ((0, 2, 1, 0), 2 / 3)])
def test_mixed_ne_against_bisection(m, expected):
    m = PayoffMatrix(*m)
    assert mixed_ne(m) == pytest.approx(expected, abs=1e-15)
    assert mixed_ne(m) == pytest.approx(bisect_indifference(m), abs=1e-12)


def test_mixed_ne_rejects_dominant_games():
    with pytest.raises(ValueError):
        mixed_ne(PRISONERS_DILEMMA)


@pytest.mark.parametrize(
    "x, m, expected",
    [(1.0, PRISONERS_DILEMMA, (1.0, 0.0)), (0.0, PRISONERS_DILEMMA, (3.0, 2.0)), (0.5, MINORITY_GAME, (0.5, 0.5))],
)
def test_reward_vector(x, m, expected):
    assert reward_vector(x, m) == expected


@pytest.mark.parametrize("x", [-0.01, 1.01, math.nan])
def test_reward_vector_rejects_bad_share(x):
    with pytest.raises(ValueError):
        reward_vector(x, PURE_COORDINATION)


def test_matrix_rejects_non_finite():
    with pytest.raises(ValueError):
        PayoffMatrix(1, math.inf, 0, 1)


@pytest.mark.parametrize("variant", [v for v in Variant if v is not Variant.DEGENERATE])
def test_game_from_constants_roundtrip(variant):
    gc = classify(game_from_constants(variant, 0.5, 2.0))
    assert (gc.variant, gc.alpha, gc.beta) == (variant, 0.5, 2.0)


@given(matrices, entries, entries, shares)
def test_column_shift_invariance(m, e1, e2, x):
    shifted = m.shift_columns(e1, e2)
    a, b = classify(m), classify(shifted)
    assert b.variant is a.variant
    if a.variant is not Variant.DEGENERATE:
        assert b.alpha == pytest.approx(a.alpha, abs=1e-12)
        assert b.beta == pytest.approx(a.beta, abs=1e-12)
    if a.mixed_ne is not None:
        assert b.mixed_ne == pytest.approx(a.mixed_ne, abs=1e-12)
    r1, r2 = reward_vector(x, m)
    s1, s2 = reward_vector(x, shifted)
    assert s1 - s2 == pytest.approx(r1 - r2, abs=1e-12)


@given(matrices)
def test_relabel_symmetry(m):
    a, b = classify(m), classify(m.relabel())
    swap = {
        Variant.COORDINATION: Variant.COORDINATION,
        Variant.ANTI_COORDINATION: Variant.ANTI_COORDINATION,
        Variant.DOMINANT_ACTION1: Variant.DOMINANT_ACTION2,
        Variant.DOMINANT_ACTION2: Variant.DOMINANT_ACTION1,
        Variant.DEGENERATE: Variant.DEGENERATE,
    }
    assert b.variant is swap[a.variant]
    if a.variant is not Variant.DEGENERATE:
        assert (b.alpha, b.beta) == pytest.approx((a.beta, a.alpha), abs=1e-12)
    if a.mixed_ne is not None:
        assert b.mixed_ne == pytest.approx(1.0 - a.mixed_ne, abs=1e-12)


@given(matrices)
def test_rewards_equal_at_mixed_equilibrium(m):
    gc = classify(m)
    if gc.mixed_ne is None:
        return
    r1, r2 = reward_vector(gc.mixed_ne, m)
    assert abs(r1 - r2) <= 1e-12 * max(1.0, abs(r1), abs(r2))
