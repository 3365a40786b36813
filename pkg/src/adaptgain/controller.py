"""Adaptive-gain controllers: control matrices, adaptation laws and their validity checks."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .game import GameClass, PayoffMatrix, Variant


@dataclass(frozen=True)
class ControlMatrix:
    g11: int = 0
    g12: int = 0
    g21: int = 0
    g22: int = 0

    def __post_init__(self) -> None:
        for value in self.entries():
            if value not in (0, 1):
                raise ValueError(f"control matrix entries must be 0 or 1, got {value!r}")

    def entries(self) -> tuple[int, int, int, int]:
        return (self.g11, self.g12, self.g21, self.g22)

    @classmethod
    def parse(cls, text: str) -> ControlMatrix:
        """Accepts ``none``, ``g1``, ``g2`` or ``custom:0110`` (row-major bits)."""
        key = text.strip().lower()
        if key in NAMED_MATRICES:
            return NAMED_MATRICES[key]
        if key.startswith("custom:"):
            bits = key.split(":", 1)[1]
            if len(bits) != 4 or set(bits) - {"0", "1"}:
                raise ValueError(f"custom control matrix needs 4 bits, got {bits!r}")
            return cls(*(int(ch) for ch in bits))
        raise ValueError(f"unknown control matrix {text!r}")

    def label(self) -> str:
        for name, matrix in NAMED_MATRICES.items():
            if matrix == self:
                return name
        return "custom:" + "".join(str(v) for v in self.entries())


ZERO = ControlMatrix()
# rewards action 2 against an action-1 opponent
G1 = ControlMatrix(0, 0, 1, 0)
# rewards mutual action 2
G2 = ControlMatrix(0, 0, 0, 1)
NAMED_MATRICES = {"none": ZERO, "g1": G1, "g2": G2}


class Family(str, enum.Enum):
    PHI1 = "phi1"  # k (x - h)
    PHI2 = "phi2"  # k x**h
    NONE = "none"

    @property
    def code(self) -> int:
        return {Family.NONE: 0, Family.PHI1: 1, Family.PHI2: 2}[self]


@dataclass(frozen=True)
class ControllerSpec:
    control_matrix: ControlMatrix = ZERO
    family: Family = Family.NONE
    k: float = 0.0
    h: float = 0.0
    g0: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        for name in ("k", "h", "g0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.family is not Family.NONE:
            if self.k <= 0 or self.h <= 0 or self.g0 <= 0:
                raise ValueError(
                    f"k, h and g0 must be positive for {self.family.value} "
                    f"(got k={self.k}, h={self.h}, g0={self.g0})"
                )
        elif self.g0 < 0:
            raise ValueError("g0 must be nonnegative")


UNCONTROLLED = ControllerSpec()


def _check_share(x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"population share x={x!r} outside [0, 1]")


def phi(spec: ControllerSpec, x: float) -> float:
    """Adaptation function: the gain obeys ``g' = phi(x) g``."""
    _check_share(x)
    if spec.family is Family.PHI1:
        return spec.k * (x - spec.h)
    if spec.family is Family.PHI2:
        return spec.k * _power(x, spec.h)
    return 0.0


def _power(x: float, h: float) -> float:
    # x**h as exp(h ln x), continuous extension 0 at x = 0
    if x == 0.0:
        return 0.0
    return math.exp(h * math.log(x))


def phi_prime(spec: ControllerSpec, x: float) -> float:
    _check_share(x)
    if spec.family is Family.PHI1:
        return spec.k
    if spec.family is Family.PHI2:
        if x == 0.0:
            if spec.h < 1.0:
                raise ValueError("phi2 with h < 1 is not differentiable at x = 0")
            return spec.k if spec.h == 1.0 else 0.0
        return spec.k * spec.h * math.exp((spec.h - 1.0) * math.log(x))
    return 0.0


def effective_payoff(nominal: PayoffMatrix, spec: ControllerSpec, g: float) -> PayoffMatrix:
    """Nominal payoffs plus the control matrix scaled by the gain."""
    if g < 0:
        raise ValueError(f"gain must be nonnegative, got {g!r}")
    g11, g12, g21, g22 = spec.control_matrix.entries()
    return PayoffMatrix(
        nominal.a + g11 * g, nominal.b + g12 * g, nominal.c + g21 * g, nominal.d + g22 * g
    )


class Theorem(str, enum.Enum):
    THM1 = "Thm1"
    THM2 = "Thm2"
    THM3 = "Thm3"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class ValidityVerdict:
    theorem: Theorem
    satisfied: bool
    detail: str

    @property
    def mode(self) -> str:
        """Short label used in sweep tables."""
        if self.theorem is Theorem.NOT_APPLICABLE:
            return "no_theorem"
        return "hypothesis_satisfied" if self.satisfied else "hypothesis_not_satisfied"


def check_validity(game: GameClass, spec: ControllerSpec) -> ValidityVerdict:
    """Match the (game, controller) pairing to its convergence theorem and test its hypotheses.

    The theorems give sufficient conditions only; an unsatisfied verdict is not a
    prediction of failure.
    """
    v = game.variant
    if v is Variant.COORDINATION:
        theorem = Theorem.THM1
        problems = _pairing(spec, Family.PHI1, G1, "g1")
        bound = game.beta / (game.alpha + game.beta)
        if not spec.h < bound:
            problems.append(f"h={spec.h:g} is not below beta/(alpha+beta)={bound:g}")
        if not spec.k > 0:
            problems.append(f"k={spec.k:g} is not positive")
    elif v is Variant.DOMINANT_ACTION1:
        theorem = Theorem.THM2
        problems = _pairing(spec, Family.PHI2, G2, "g2")
        if not spec.k > game.alpha:
            problems.append(f"k={spec.k:g} does not exceed alpha={game.alpha:g}")
    elif v is Variant.ANTI_COORDINATION:
        theorem = Theorem.THM3
        problems = _pairing(spec, Family.PHI2, G2, "g2")
        if not spec.k > 0:
            problems.append(f"k={spec.k:g} is not positive")
    else:
        return ValidityVerdict(
            Theorem.NOT_APPLICABLE, False, f"no convergence theorem covers a {v.value} game"
        )
    if problems:
        return ValidityVerdict(theorem, False, "; ".join(problems))
    return ValidityVerdict(theorem, True, f"all {theorem.value} hypotheses hold")


def _pairing(spec: ControllerSpec, family: Family, matrix: ControlMatrix, name: str) -> list[str]:
    problems = []
    if spec.family is not family:
        problems.append(f"adaptation family is {spec.family.value}, needs {family.value}")
    if spec.control_matrix != matrix:
        problems.append(f"control matrix is {spec.control_matrix.label()}, needs {name}")
    return problems
