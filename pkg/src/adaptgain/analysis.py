"""Certification suites for the asymptotic claims, proof-level bounds and basin sampling."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .controller import G1, G2, ControllerSpec, Family, Theorem, check_validity
from .convergence import (
    DEFAULT_CRITERIA,
    ConvergenceCriteria,
    detect_convergence,
    label_limit,
)
from .dynamics import ControlledSystem, SystemState
from .game import GameClass, Variant, game_from_constants
from .integrator import IntegrationError, IntegratorConfig, Trajectory, integrate

SUITES = ("prop2", "thm1", "thm2", "thm3")
TENTHS = tuple(round(0.1 * i, 10) for i in range(1, 10))

# Relative slack allowed on the pointwise proof bounds.
BOUND_SLACK = 1e-6


def region_of(s: SystemState, game: GameClass) -> str:
    """Region A, B or C of the coordination-game state space.

    A holds states below the mixed equilibrium, B the rest of ``x < 1`` and C the
    edge ``x = 1``.
    """
    if game.variant is not Variant.COORDINATION:
        raise ValueError("regions are defined for coordination games only")
    if s.x == 1.0:
        return "C"
    return "A" if s.x < game.threshold else "B"


def escape_rate(game: GameClass, spec: ControllerSpec) -> float:
    """Exponential growth rate bounding the gain from below while in region B."""
    return spec.k * (game.threshold - spec.h)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    detail: str

    def __bool__(self) -> bool:
        return self.ok


def check_thm1_escape(traj: Trajectory, game: GameClass, spec: ControllerSpec) -> CheckResult:
    """Region-B exit certificate for a coordination run under (G1, phi1).

    Passes when the run leaves B for A, never comes back, and until the exit the
    gain stays above ``g(0) exp(mu t)``.
    """
    verdict = check_validity(game, spec)
    if verdict.theorem is not Theorem.THM1 or not verdict.satisfied:
        raise ValueError(f"configuration outside the escape theorem: {verdict.detail}")
    threshold = game.threshold
    if not threshold <= traj.x[0] < 1.0:
        raise ValueError(f"trajectory starts at x={traj.x[0]:g}, not in region B")
    in_a = traj.x < threshold
    if not in_a.any():
        return CheckResult(False, "trajectory never leaves region B")
    exit_idx = int(np.argmax(in_a))
    if not in_a[exit_idx:].all():
        back = exit_idx + int(np.argmax(~in_a[exit_idx:]))
        return CheckResult(False, f"re-entered region B at t={traj.times[back]:.6g}")
    mu = escape_rate(game, spec)
    t = traj.times[:exit_idx]
    bound = traj.g[0] * np.exp(mu * t) * (1.0 - BOUND_SLACK)
    short = traj.g[:exit_idx] < bound
    if short.any():
        i = int(np.argmax(short))
        return CheckResult(
            False, f"gain {traj.g[i]:.6g} below bound {bound[i]:.6g} at t={t[i]:.6g}"
        )
    return CheckResult(True, f"exit from B at t={traj.times[exit_idx]:.6g}, mu={mu:.6g}")


def check_thm2_bound(traj: Trajectory, game: GameClass, eps: float, gamma: float) -> CheckResult:
    """Exponential decay certificate for a dominant-strategy run under (G2, phi2).

    Locates the first recorded time with ``x <= 1 - eps`` and
    ``g >= alpha/eps + beta + gamma`` and checks
    ``x(t) <= (1 - eps) exp(-gamma eps^2 (t - tau))`` afterwards.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    if game.variant is not Variant.DOMINANT_ACTION1:
        raise ValueError("the decay bound applies to dominant-action-1 games")
    g_needed = game.alpha / eps + game.beta + gamma
    hit = (traj.x <= 1.0 - eps) & (traj.g >= g_needed)
    if not hit.any():
        return CheckResult(False, f"tau_eps not reached (needs g >= {g_needed:.6g})")
    i = int(np.argmax(hit))
    tau = traj.times[i]
    t = traj.times[i:]
    bound = (1.0 - eps) * np.exp(-gamma * eps**2 * (t - tau)) * (1.0 + BOUND_SLACK)
    over = traj.x[i:] > bound
    if over.any():
        j = int(np.argmax(over))
        return CheckResult(False, f"x={traj.x[i + j]:.6g} exceeds bound {bound[j]:.6g} at t={t[j]:.6g}")
    return CheckResult(True, f"tau_eps={tau:.6g}, bound holds to t={t[-1]:.6g}")


@dataclass(frozen=True)
class SuiteCase:
    variant: str
    alpha: float
    beta: float
    family: str
    k: float
    h: float
    x0: float
    g0: float
    claim: str  # convergence target asserted for the case

    def system(self) -> ControlledSystem:
        nominal = game_from_constants(self.variant, self.alpha, self.beta)
        if self.family == Family.NONE.value:
            return ControlledSystem(nominal)
        matrix = G1 if self.family == Family.PHI1.value else G2
        return ControlledSystem(nominal, ControllerSpec(matrix, self.family, self.k, self.h, self.g0))

    def params(self) -> dict:
        return {
            "variant": self.variant, "alpha": self.alpha, "beta": self.beta, "family": self.family,
            "k": self.k, "h": self.h, "x0": self.x0, "g0": self.g0,
        }


@dataclass
class SuiteReport:
    suite: str
    cases_total: int = 0
    cases_passed: int = 0
    failures: list[tuple[dict, tuple[float, float] | None, str]] = field(default_factory=list)
    details: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.cases_total > 0 and self.cases_passed == self.cases_total

    def summary(self) -> str:
        return f"{self.suite}: {self.cases_passed}/{self.cases_total} cases pass"


@dataclass(frozen=True)
class SuiteGrid:
    cases: tuple[SuiteCase, ...]
    t_end: float
    dt: float = 1e-3
    record_every: int = 100


def prop2_claim(variant: Variant, x0: float, x_star: float | None) -> str | None:
    if variant is Variant.COORDINATION:
        if abs(x0 - x_star) < 1e-12:
            return None
        return "X0" if x0 < x_star else "X1"
    if variant is Variant.DOMINANT_ACTION1:
        return "X1" if x0 > 0 else None
    if variant is Variant.DOMINANT_ACTION2:
        return "X0" if x0 < 1 else None
    if variant is Variant.ANTI_COORDINATION:
        return "MixedNE" if 0 < x0 < 1 else None
    return None


def default_grid(suite: str) -> SuiteGrid:
    """Deterministic default grid for a suite; t_end is chosen per suite."""
    if suite == "prop2":
        cases = []
        for variant in (Variant.COORDINATION, Variant.DOMINANT_ACTION1,
                        Variant.DOMINANT_ACTION2, Variant.ANTI_COORDINATION):
            for alpha, beta in itertools.product((0.5, 1.0, 2.0), repeat=2):
                x_star = beta / (alpha + beta)
                for x0 in TENTHS:
                    claim = prop2_claim(variant, x0, x_star)
                    if claim is not None:
                        cases.append(SuiteCase(variant.value, alpha, beta, "none", 0.0, 0.0, x0, 0.0, claim))
        return SuiteGrid(tuple(cases), t_end=100.0)
    if suite == "thm1":
        cases = [
            SuiteCase(Variant.COORDINATION.value, 1.0, 1.0, "phi1", k, h, x0, g0, "X0+GainZero")
            for k in (0.5, 1.0, 2.0)
            for h in (0.1, 0.25, 0.4)
            for x0 in (*TENTHS, 0.99)
            for g0 in (0.1, 1.0)
        ]
        return SuiteGrid(tuple(cases), t_end=200.0)
    if suite == "thm2":
        # k stays well above alpha so the transient gain fits under the overflow guard
        cases = [
            SuiteCase(Variant.DOMINANT_ACTION1.value, alpha, beta, "phi2", k, h, x0, 0.2, "X0+GainConstant")
            for alpha, beta in ((1.0, 1.0), (0.5, 2.0))
            for k in (1.5, 2.0, 3.0)
            for h in (0.5, 1.0, 2.0)
            for x0 in (0.1, 0.5, 0.99)
        ]
        return SuiteGrid(tuple(cases), t_end=50.0)
    if suite == "thm3":
        cases = [
            SuiteCase(Variant.ANTI_COORDINATION.value, 1.0, 1.0, "phi2", k, 1.0, x0, 0.1, "X0+GainConstant")
            for k in (0.05, 0.1, 1.0)
            for x0 in (*TENTHS, 0.99)
        ]
        return SuiteGrid(tuple(cases), t_end=500.0)
    raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


def _run_case(args) -> tuple[bool, tuple[float, float] | None, str]:
    case, grid, crit = args
    sys = case.system()
    cfg = IntegratorConfig(dt=grid.dt, t_end=grid.t_end, record_every=grid.record_every)
    try:
        traj = integrate(sys, SystemState(case.x0, case.g0), cfg, label=False)
    except IntegrationError as exc:
        return False, None, str(exc)
    result = detect_convergence(traj, crit, case.claim, sys)
    terminal = (float(traj.x[-1]), float(traj.g[-1]))
    return result.converged, terminal, f"{case.claim}: {result.diagnostic}"


def run_suite(
    suite: str,
    grid: SuiteGrid | None = None,
    crit: ConvergenceCriteria = DEFAULT_CRITERIA,
    workers: int = 1,
) -> SuiteReport:
    grid = grid or default_grid(suite)
    if not grid.cases:
        raise ValueError("empty suite grid")
    jobs = [(case, grid, crit) for case in grid.cases]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_case, jobs, chunksize=8))
    else:
        outcomes = [_run_case(job) for job in jobs]
    report = SuiteReport(suite, cases_total=len(jobs))
    for case, (ok, terminal, detail) in zip(grid.cases, outcomes):
        if ok:
            report.cases_passed += 1
        else:
            report.failures.append((case.params(), terminal, detail))
    return report


def basin_sample(
    sys: ControlledSystem,
    n: int,
    seed: int,
    cfg: IntegratorConfig = IntegratorConfig(t_end=200.0),
    crit: ConvergenceCriteria = DEFAULT_CRITERIA,
    g_range: tuple[float, float] = (0.05, 2.0),
) -> dict[tuple[float, float], str]:
    """Limit labels for ``n`` random initial states.

    x0 is uniform on [0, 1); g0 is uniform on ``g_range`` for adaptive controllers
    and fixed at the spec's g0 otherwise.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, 1.0, size=n)
    if sys.spec.family is Family.NONE:
        gs = np.full(n, sys.spec.g0)
    else:
        gs = rng.uniform(*g_range, size=n)
    out = {}
    for x0, g0 in zip(xs, gs):
        traj = integrate(sys, SystemState(float(x0), float(g0)), cfg, label=False)
        out[(float(x0), float(g0))] = label_limit(traj, sys, crit)
    return out


def exploratory_run(case: SuiteCase, t_end: float, crit: ConvergenceCriteria = DEFAULT_CRITERIA) -> dict:
    """Integrate a case outside a theorem's hypotheses and report what happened; never fails."""
    sys = case.system()
    try:
        traj = integrate(sys, SystemState(case.x0, case.g0), IntegratorConfig(t_end=t_end), label=False)
    except IntegrationError as exc:
        return {**case.params(), "outcome": "integration_error", "detail": str(exc)}
    return {**case.params(), "outcome": label_limit(traj, sys, crit),
            "terminal": (float(traj.x[-1]), float(traj.g[-1]))}


def gain_is_monotone(traj: Trajectory, slack: float = 1e-12) -> bool:
    return bool(np.all(np.diff(traj.g) >= -slack * np.maximum(1.0, traj.g[:-1])))


def window_maxima(traj: Trajectory, width: float) -> list[float]:
    """Maximum gain over consecutive windows of the given duration."""
    edges = np.arange(traj.times[0], traj.times[-1] + width, width)
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (traj.times >= lo) & (traj.times < hi)
        if sel.any():
            out.append(float(traj.g[sel].max()))
    return out
