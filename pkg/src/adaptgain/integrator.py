"""Fixed-step RK4 integration of the controlled system on its invariant domain."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dynamics import ControlledSystem, SystemState, in_domain

GAIN_LIMIT = 1e12


class IntegrationError(RuntimeError):
    """Non-finite values or gain overflow during integration."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_end: float = 50.0
    record_every: int = 100
    clamp_eps: float = 1e-12

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be at least dt")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be a positive integer")
        if self.clamp_eps < 0:
            raise ValueError("clamp_eps must be nonnegative")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class Trajectory:
    times: np.ndarray
    x: np.ndarray
    g: np.ndarray
    converged_to: str | None = None
    max_clamp: float = 0.0
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def terminal(self) -> SystemState:
        return SystemState(float(self.x[-1]), float(self.g[-1]))

    @property
    def states(self) -> list[SystemState]:
        return [SystemState(float(x), float(g)) for x, g in zip(self.x, self.g)]

    def at(self, t: float) -> SystemState:
        """Recorded state at the recorded time closest to ``t``."""
        i = int(np.argmin(np.abs(self.times - t)))
        return SystemState(float(self.x[i]), float(self.g[i]))


def logit(x: float) -> float:
    if x == 0.0:
        return -math.inf
    if x == 1.0:
        return math.inf
    return math.log(x) - math.log1p(-x)


def _project(x: float, g: float) -> tuple[float, float, float]:
    xp = min(max(x, 0.0), 1.0)
    gp = max(g, 0.0)
    return xp, gp, max(abs(xp - x), abs(gp - g))


def step(sys: ControlledSystem, s: SystemState, dt: float) -> SystemState:
    """One RK4 step (in logit/log-gain coordinates) followed by projection onto the domain."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not in_domain(s.x, s.g):
        raise ValueError(f"state {s} outside the invariant domain")
    z, g = _kernels.rk4_step(sys.params(), logit(s.x), s.g, dt)
    if math.isnan(z) or not math.isfinite(g):
        raise IntegrationError("non-finite state, step size too large", dt)
    x = s.x if math.isinf(z) else _kernels.expit(z)
    x, g, _ = _project(x, g)
    return SystemState(x, g)


def integrate(
    sys: ControlledSystem,
    s0: SystemState,
    cfg: IntegratorConfig = IntegratorConfig(),
    *,
    label: bool = True,
) -> Trajectory:
    if not in_domain(s0.x, s0.g):
        raise ValueError(f"initial state {s0} outside the invariant domain")
    times, zs, gs, status, fail = _kernels.rk4_run(
        sys.params(), logit(s0.x), float(s0.g), cfg.dt, cfg.n_steps, int(cfg.record_every), GAIN_LIMIT
    )
    if status == _kernels.STATUS_NONFINITE:
        raise IntegrationError("non-finite state, step size too large", fail * cfg.dt)
    if status == _kernels.STATUS_OVERFLOW:
        raise IntegrationError(f"gain exceeded {GAIN_LIMIT:g}", fail * cfg.dt)
    xs = _expit(zs)
    xs[0] = s0.x
    clipped_x = np.clip(xs, 0.0, 1.0)
    clipped_g = np.maximum(gs, 0.0)
    max_clamp = float(max(np.max(np.abs(clipped_x - xs)), np.max(np.abs(clipped_g - gs))))
    traj = Trajectory(times, clipped_x, clipped_g, max_clamp=max_clamp)
    if label:
        from .convergence import label_limit

        traj.converged_to = label_limit(traj, sys)
    return traj


def _expit(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out
