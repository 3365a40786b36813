"""The controlled replicator system: vector field, Jacobian and equilibria."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerSpec, Family, UNCONTROLLED, phi, phi_prime
from .game import GameClass, PayoffMatrix, classify

NON_HYPERBOLIC_TOL = 1e-9


@dataclass(frozen=True)
class SystemState:
    x: float
    g: float

    def __post_init__(self) -> None:
        if not in_domain(self.x, self.g):
            raise ValueError(f"state (x={self.x!r}, g={self.g!r}) outside [0,1] x [0,inf)")


def in_domain(x: float, g: float) -> bool:
    return 0.0 <= x <= 1.0 and 0.0 <= g < math.inf


@dataclass(frozen=True)
class ControlledSystem:
    nominal: PayoffMatrix
    spec: ControllerSpec = UNCONTROLLED
    game: GameClass = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "game", classify(self.nominal))

    @property
    def slope(self) -> float:
        """Coefficient of x in the payoff difference, ``a + d - b - c``."""
        m = self.nominal
        return m.a + m.d - m.b - m.c

    @property
    def gain_couplings(self) -> tuple[int, int]:
        g11, g12, g21, g22 = self.spec.control_matrix.entries()
        return g11 - g21, g12 - g22

    def bracket(self, x: float, g: float) -> float:
        """Reward advantage of action 1 under the current effective payoff."""
        m = self.nominal
        u, v = self.gain_couplings
        return self.slope * x + m.b - m.d + u * g * x + v * g * (1.0 - x)

    def params(self) -> np.ndarray:
        """Flat parameter vector consumed by the compiled kernels."""
        m = self.nominal
        s = self.spec
        return np.array(
            [m.a, m.b, m.c, m.d, *s.control_matrix.entries(), s.family.code, s.k, s.h],
            dtype=np.float64,
        )


def vector_field(sys: ControlledSystem, s: SystemState) -> tuple[float, float]:
    x, g = s.x, s.g
    if not in_domain(x, g):
        raise ValueError(f"state ({x!r}, {g!r}) outside the invariant domain")
    dx = x * (1.0 - x) * sys.bracket(x, g)
    dg = phi(sys.spec, x) * g
    return dx, dg


def jacobian(sys: ControlledSystem, s: SystemState) -> np.ndarray:
    x, g = s.x, s.g
    if not in_domain(x, g):
        raise ValueError(f"state ({x!r}, {g!r}) outside the invariant domain")
    u, v = sys.gain_couplings
    b = sys.bracket(x, g)
    q = x * (1.0 - x)
    return np.array(
        [
            [(1.0 - 2.0 * x) * b + q * (sys.slope + (u - v) * g), q * (u * x + v * (1.0 - x))],
            [phi_prime(sys.spec, x) * g, phi(sys.spec, x)],
        ]
    )


class Stability(str, enum.Enum):
    STABLE_NODE = "StableNode"
    SADDLE = "Saddle"
    SOURCE = "Source"
    NON_HYPERBOLIC = "NonHyperbolic"


def classify_eigenvalues(eigenvalues, tol: float = NON_HYPERBOLIC_TOL) -> Stability:
    re = [complex(ev).real for ev in eigenvalues]
    if any(abs(r) < tol for r in re):
        return Stability.NON_HYPERBOLIC
    if all(r < 0 for r in re):
        return Stability.STABLE_NODE
    if all(r > 0 for r in re):
        return Stability.SOURCE
    return Stability.SADDLE


@dataclass(frozen=True)
class EquilibriumReport:
    point: SystemState
    eigenvalues: tuple[complex, complex]
    stability: Stability
    # True when every (point.x, g), g >= 0, is an equilibrium; eigenvalues are at g = point.g
    ray: bool = False


def _report(sys: ControlledSystem, x: float, g: float, ray: bool = False) -> EquilibriumReport:
    if ray:
        # x = 0 ray: the Jacobian is triangular there, so the spectrum is the diagonal
        # even where phi is not differentiable
        eig = (complex(sys.bracket(0.0, g)), complex(phi(sys.spec, 0.0)))
    else:
        eig = tuple(complex(e) for e in np.linalg.eigvals(jacobian(sys, SystemState(x, g))))
    return EquilibriumReport(SystemState(x, g), eig, classify_eigenvalues(eig), ray)


def find_equilibria(sys: ControlledSystem) -> list[EquilibriumReport]:
    """All equilibria of the planar system in the invariant domain.

    Controlled families are enumerated on the ``g = 0`` slice plus the set where
    ``phi`` vanishes (``x = h`` for phi1, the ``x = 0`` ray for phi2). Without
    adaptation the gain is a frozen parameter and the slice ``g = g0`` is used.
    """
    spec = sys.spec
    g_slice = spec.g0 if spec.family is Family.NONE else 0.0
    xs = [0.0, 1.0, *_interior_roots(sys, g_slice)]
    reports: list[EquilibriumReport] = []
    for x in sorted(set(xs)):
        if spec.family is Family.PHI2 and x == 0.0:
            reports.append(_report(sys, 0.0, 0.0, ray=True))
        else:
            reports.append(_report(sys, x, g_slice))
    if spec.family is Family.PHI1 and 0.0 < spec.h < 1.0:
        u, v = sys.gain_couplings
        h = spec.h
        denom = u * h + v * (1.0 - h)
        if denom != 0.0:
            g_star = -(sys.slope * h + sys.nominal.b - sys.nominal.d) / denom
            if g_star > 0.0:
                reports.append(_report(sys, h, g_star))
    return reports


def _interior_roots(sys: ControlledSystem, g: float) -> list[float]:
    # bracket is affine in x: (slope + (u - v) g) x + (b - d + v g)
    u, v = sys.gain_couplings
    lin = sys.slope + (u - v) * g
    const = sys.nominal.b - sys.nominal.d + v * g
    if lin == 0.0:
        return []
    root = -const / lin
    return [root] if 0.0 < root < 1.0 else []


def replicator_stability(m: PayoffMatrix) -> list[tuple[float, bool]]:
    """Rest points of the uncontrolled replicator equation with asymptotic stability flags.

    Stable rest points are the evolutionarily stable strategies of the game.
    """
    sys = ControlledSystem(m)
    out = []
    for x in sorted({0.0, 1.0, *_interior_roots(sys, 0.0)}):
        slope = jacobian(sys, SystemState(x, 0.0))[0, 0]
        out.append((x, slope < -NON_HYPERBOLIC_TOL))
    return out
