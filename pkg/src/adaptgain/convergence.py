"""Trailing-window convergence tests on recorded trajectories."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .controller import Family
from .dynamics import ControlledSystem
from .integrator import Trajectory

LABELS = ("X0", "X1", "MixedNE", "GainConstant", "None")
TARGETS = ("X0", "X1", "MixedNE", "GainZero", "GainConstant", "X0+GainZero", "X0+GainConstant")


@dataclass(frozen=True)
class ConvergenceCriteria:
    x_tol: float = 1e-3
    g_tol: float = 0.05
    dg_tol: float = 1e-6
    window: float = 5.0

    def __post_init__(self) -> None:
        for name in ("x_tol", "g_tol", "dg_tol", "window"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_CRITERIA = ConvergenceCriteria()


@dataclass(frozen=True)
class ConvergenceResult:
    converged: bool
    t_settle: float | None
    diagnostic: str

    def __bool__(self) -> bool:
        return self.converged


def gain_rate(traj: Trajectory, sys: ControlledSystem) -> np.ndarray:
    """|phi(x) g| along the recorded points."""
    spec = sys.spec
    x = traj.x
    if spec.family is Family.PHI1:
        rate = spec.k * (x - spec.h)
    elif spec.family is Family.PHI2:
        with np.errstate(divide="ignore"):
            rate = spec.k * np.where(x > 0, np.exp(spec.h * np.log(np.where(x > 0, x, 1.0))), 0.0)
    else:
        rate = np.zeros_like(x)
    return np.abs(rate * traj.g)


def _predicates(traj, sys, crit, target) -> list[tuple[str, np.ndarray]]:
    preds = []
    for part in target.split("+"):
        if part == "X0":
            preds.append(("|x| < x_tol", np.abs(traj.x) < crit.x_tol))
        elif part == "X1":
            preds.append(("|1 - x| < x_tol", np.abs(1.0 - traj.x) < crit.x_tol))
        elif part == "MixedNE":
            x_star = sys.game.mixed_ne if sys is not None else None
            if x_star is None:
                raise ValueError("MixedNE target needs a game with an interior equilibrium")
            preds.append(("|x - x*| < x_tol", np.abs(traj.x - x_star) < crit.x_tol))
        elif part == "GainZero":
            preds.append(("g < g_tol", traj.g < crit.g_tol))
        elif part == "GainConstant":
            if sys is None:
                raise ValueError("GainConstant target needs the controlled system")
            preds.append(("|phi(x) g| < dg_tol", gain_rate(traj, sys) < crit.dg_tol))
        else:
            raise ValueError(f"unknown convergence target {target!r}")
    return preds


def detect_convergence(
    traj: Trajectory,
    crit: ConvergenceCriteria = DEFAULT_CRITERIA,
    target: str = "X0",
    sys: ControlledSystem | None = None,
) -> ConvergenceResult:
    """Whether the target holds at every recorded point of the trailing window."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    t = traj.times
    if t[-1] - t[0] < crit.window:
        return ConvergenceResult(False, None, f"trajectory shorter than window {crit.window:g}")
    ok = np.ones(len(t), dtype=bool)
    in_window = t >= t[-1] - crit.window
    for name, mask in _predicates(traj, sys, crit, target):
        bad = in_window & ~mask
        if bad.any():
            i = int(np.argmax(bad))
            return ConvergenceResult(
                False,
                None,
                f"{name} violated at t={t[i]:.6g} (x={traj.x[i]:.6g}, g={traj.g[i]:.6g})",
            )
        ok &= mask
    failing = np.flatnonzero(~ok)
    t_settle = float(t[0]) if failing.size == 0 else float(t[failing[-1] + 1])
    return ConvergenceResult(True, t_settle, f"{target} holds from t={t_settle:.6g}")


def label_limit(
    traj: Trajectory, sys: ControlledSystem, crit: ConvergenceCriteria = DEFAULT_CRITERIA
) -> str:
    """Name of the limit reached by ``traj`` ('None' when nothing settles)."""
    candidates = ["X0", "X1"]
    if sys.game.mixed_ne is not None:
        candidates.append("MixedNE")
    for target in candidates:
        if detect_convergence(traj, crit, target, sys):
            return target
    if sys.spec.family is not Family.NONE and detect_convergence(traj, crit, "GainConstant", sys):
        return "GainConstant"
    return "None"


def settle_time(traj: Trajectory, sys: ControlledSystem, label: str,
                crit: ConvergenceCriteria = DEFAULT_CRITERIA) -> float | None:
    if label not in LABELS or label == "None":
        return None
    return detect_convergence(traj, crit, label, sys).t_settle
