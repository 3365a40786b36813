"""Symmetric 2x2 matrix games: classification, rewards and the mixed Nash equilibrium."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Variant(str, enum.Enum):
    COORDINATION = "coordination"
    DOMINANT_ACTION1 = "dominant-action1"
    DOMINANT_ACTION2 = "dominant-action2"
    ANTI_COORDINATION = "anti-coordination"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class PayoffMatrix:
    """Payoffs ``[[a, b], [c, d]]``.

    ``a``: action 1 against 1, ``b``: 1 against 2, ``c``: 2 against 1,
    ``d``: 2 against 2.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        for name in "abcd":
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"payoff entry {name}={value!r} is not finite")

    @classmethod
    def from_sequence(cls, values) -> PayoffMatrix:
        a, b, c, d = (float(v) for v in values)
        return cls(a, b, c, d)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def relabel(self) -> PayoffMatrix:
        """Swap the names of the two actions (rows and columns)."""
        return PayoffMatrix(self.d, self.c, self.b, self.a)

    def shift_columns(self, e1: float, e2: float) -> PayoffMatrix:
        return PayoffMatrix(self.a + e1, self.b + e2, self.c + e1, self.d + e2)


@dataclass(frozen=True)
class GameClass:
    variant: Variant
    alpha: float | None = None
    beta: float | None = None
    mixed_ne: float | None = None

    @property
    def threshold(self) -> float:
        """``beta / (alpha + beta)``, the interior fixed point for two-sided games."""
        if self.alpha is None or self.beta is None:
            raise ValueError(f"{self.variant.value} game has no alpha/beta")
        return self.beta / (self.alpha + self.beta)

    def nash_equilibria(self) -> list[str]:
        """Pure and mixed NE as printable action profiles."""
        v = self.variant
        if v is Variant.COORDINATION:
            return ["(1,1)", "(2,2)", f"mixed x*={_fmt(self.mixed_ne)}"]
        if v is Variant.ANTI_COORDINATION:
            return ["(1,2)", "(2,1)", f"mixed x*={_fmt(self.mixed_ne)}"]
        if v is Variant.DOMINANT_ACTION1:
            return ["(1,1)"]
        if v is Variant.DOMINANT_ACTION2:
            return ["(2,2)"]
        return []


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.10g}"


def classify(m: PayoffMatrix) -> GameClass:
    # exact comparisons on purpose: ties are reported as Degenerate
    a, b, c, d = m.as_tuple()
    if a == c or d == b:
        return GameClass(Variant.DEGENERATE)
    if d > b and a > c:
        return GameClass(Variant.COORDINATION, a - c, d - b, _mixed(m))
    if d < b and a > c:
        return GameClass(Variant.DOMINANT_ACTION1, a - c, b - d)
    if d > b and a < c:
        return GameClass(Variant.DOMINANT_ACTION2, c - a, d - b)
    return GameClass(Variant.ANTI_COORDINATION, c - a, b - d, _mixed(m))


def _mixed(m: PayoffMatrix) -> float:
    return (m.d - m.b) / (m.a + m.d - m.b - m.c)


def mixed_ne(m: PayoffMatrix) -> float:
    """Probability of action 1 at which both actions earn the same reward."""
    game = classify(m)
    if game.variant not in (Variant.COORDINATION, Variant.ANTI_COORDINATION):
        raise ValueError(f"no interior mixed equilibrium for a {game.variant.value} game")
    return game.mixed_ne


def reward_vector(x: float, m: PayoffMatrix) -> tuple[float, float]:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"population share x={x!r} outside [0, 1]")
    return (m.a * x + m.b * (1.0 - x), m.c * x + m.d * (1.0 - x))


def game_from_constants(variant: Variant | str, alpha: float, beta: float) -> PayoffMatrix:
    """Smallest nonnegative payoff matrix with the given class and constants."""
    variant = Variant(variant)
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if variant is Variant.COORDINATION:
        return PayoffMatrix(alpha, 0.0, 0.0, beta)
    if variant is Variant.DOMINANT_ACTION1:
        return PayoffMatrix(alpha, beta, 0.0, 0.0)
    if variant is Variant.DOMINANT_ACTION2:
        return PayoffMatrix(0.0, 0.0, alpha, beta)
    if variant is Variant.ANTI_COORDINATION:
        return PayoffMatrix(0.0, beta, alpha, 0.0)
    raise ValueError("degenerate games have no constants")


PURE_COORDINATION = PayoffMatrix(1.0, 0.0, 0.0, 1.0)
PRISONERS_DILEMMA = PayoffMatrix(1.0, 3.0, 0.0, 2.0)
MINORITY_GAME = PayoffMatrix(0.0, 1.0, 1.0, 0.0)
