"""Finite-population imitation dynamics used as an independent check on the ODE.

Each of ``N`` agents revises at rate ``rate_scale``: it picks another agent
uniformly at random and copies that agent's action with probability
``max(0, r_model - r_focal) / rate_scale``. As ``N`` grows the share of
action-1 players follows the replicator equation in the same time units.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import ControlledSystem, SystemState
from .integrator import IntegratorConfig, Trajectory, integrate


class RateScaleError(ValueError):
    """An imitation probability would exceed one."""


@dataclass(frozen=True)
class AbmConfig:
    population: int = 10_000
    seed: int = 0
    rate_scale: float = 1.0
    record_dt: float = 0.1

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if not self.rate_scale > 0:
            raise ValueError("rate_scale must be positive")
        if not self.record_dt > 0:
            raise ValueError("record_dt must be positive")

    @property
    def dt_event(self) -> float:
        """Mean waiting time between revision events."""
        return 1.0 / (self.population * self.rate_scale)


def max_payoff_difference(sys: ControlledSystem, g: float = 0.0) -> float:
    """Largest |r1 - r2| over x in [0, 1] at gain ``g`` (the difference is affine in x)."""
    return max(abs(sys.bracket(0.0, g)), abs(sys.bracket(1.0, g)))


def simulate_abm(sys: ControlledSystem, x0: float, cfg: AbmConfig, t_end: float) -> Trajectory:
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"x0={x0!r} outside [0, 1]")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    bound = max_payoff_difference(sys, sys.spec.g0)
    if cfg.rate_scale * (1.0 + 1e-12) < bound:
        raise RateScaleError(
            f"rate_scale={cfg.rate_scale:g} below the payoff-difference bound {bound:g}"
        )
    n1 = int(round(x0 * cfg.population))
    times, counts, gains, status, events = _kernels.abm_run(
        sys.params(), cfg.population, n1, float(sys.spec.g0), float(cfg.rate_scale),
        float(t_end), float(cfg.record_dt), int(cfg.seed),
    )
    if status == _kernels.STATUS_RATE:
        raise RateScaleError(
            f"payoff difference exceeded rate_scale={cfg.rate_scale:g} "
            f"after {events} events; raise rate_scale"
        )
    if status != _kernels.STATUS_OK:
        raise RuntimeError(f"agent simulation failed after {events} events")
    traj = Trajectory(times, counts / cfg.population, gains)
    traj.meta.update(population=cfg.population, seed=cfg.seed, events=int(events), counts=counts)
    return traj


@dataclass(frozen=True)
class DeviationReport:
    sup_norm: float
    times: np.ndarray
    x_abm: np.ndarray
    x_ode: np.ndarray
    absorbed: bool  # the finite population hit x = 0 while the ODE was still positive

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.x_abm - self.x_ode)


def compare_to_ode(sys: ControlledSystem, x0: float, cfg: AbmConfig, t_end: float) -> DeviationReport:
    abm = simulate_abm(sys, x0, cfg, t_end)
    dt = 1e-3
    every = max(1, int(round(cfg.record_dt / dt)))
    ode = integrate(
        sys, SystemState(x0, sys.spec.g0), IntegratorConfig(dt=dt, t_end=t_end, record_every=every),
        label=False,
    )
    n = min(len(abm), len(ode))
    if not np.allclose(abm.times[:n], ode.times[:n], atol=1e-9):
        raise RuntimeError("agent and ODE record grids do not line up")
    x_abm = abm.x[:n]
    x_ode = ode.x[:n]
    absorbed = bool(np.any((x_abm == 0.0) & (x_ode > 0.0)))
    sup = float(np.max(np.abs(x_abm - x_ode)))
    return DeviationReport(sup, abm.times[:n], x_abm, x_ode, absorbed)


def median_deviation(sys: ControlledSystem, x0: float, population: int, seeds, t_end: float,
                     rate_scale: float = 1.0) -> float:
    devs = [
        compare_to_ode(sys, x0, AbmConfig(population, seed, rate_scale), t_end).sup_norm
        for seed in seeds
    ]
    return float(np.median(devs))


MEAN_FIELD_CASES = (
    # name, payoff entries, x0
    ("minority", (0.0, 1.0, 1.0, 0.0), 0.95),
    ("pure-coordination", (1.0, 0.0, 0.0, 1.0), 0.8),
    ("prisoners-dilemma", (1.0, 3.0, 0.0, 2.0), 0.3),
)


def run_mean_field_suite(
    populations=(100, 1000, 10_000), seeds=range(20), t_end: float = 10.0, tol: float = 0.05,
    cases=MEAN_FIELD_CASES,
):
    """Median sup-norm ABM/ODE deviation per game and population size.

    A game passes when the largest population stays under ``tol`` and the median
    deviation strictly decreases with the population size.
    """
    from .analysis import SuiteReport
    from .game import PayoffMatrix

    report = SuiteReport("abm")
    for name, entries, x0 in cases:
        sys = ControlledSystem(PayoffMatrix.from_sequence(entries))
        medians = [median_deviation(sys, x0, n, seeds, t_end) for n in populations]
        report.cases_total += 1
        decreasing = all(b < a for a, b in zip(medians, medians[1:]))
        params = {"game": name, "x0": x0, "populations": list(populations), "medians": medians}
        if decreasing and medians[-1] < tol:
            report.cases_passed += 1
        else:
            why = "not strictly decreasing" if not decreasing else f"median {medians[-1]:.4g} >= {tol:g}"
            report.failures.append((params, None, why))
        report.details.append(params)
    return report
