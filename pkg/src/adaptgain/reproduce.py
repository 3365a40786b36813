"""Named reference runs: uncontrolled dynamics of the three example games and the
three controlled designs."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .controller import G1, G2, ControllerSpec, Family
from .dynamics import ControlledSystem, SystemState
from .game import MINORITY_GAME, PRISONERS_DILEMMA, PURE_COORDINATION, PayoffMatrix
from .integrator import IntegratorConfig, Trajectory, integrate
from .io import write_trajectory_csv

UNCONTROLLED_GAMES = {
    "pure-coordination": PURE_COORDINATION,
    "prisoners-dilemma": PRISONERS_DILEMMA,
    "minority": MINORITY_GAME,
}
UNCONTROLLED_X0 = (0.04, 0.14, 0.42, 0.66, 0.79, 0.92, 0.96)


@dataclass(frozen=True)
class ControlledCase:
    name: str
    payoff: PayoffMatrix
    spec: ControllerSpec
    x0: float
    t_end: float

    def system(self) -> ControlledSystem:
        return ControlledSystem(self.payoff, self.spec)

    def run(self, dt: float = 1e-3, record_every: int = 100) -> Trajectory:
        cfg = IntegratorConfig(dt=dt, t_end=self.t_end, record_every=record_every)
        return integrate(self.system(), SystemState(self.x0, self.spec.g0), cfg)


CONTROLLED_CASES = (
    ControlledCase("coordination", PURE_COORDINATION, ControllerSpec(G1, Family.PHI1, 1.0, 0.4, 0.2), 0.99, 50.0),
    ControlledCase("prisoners-dilemma", PRISONERS_DILEMMA, ControllerSpec(G2, Family.PHI2, 2.0, 1.0, 0.2), 0.99, 20.0),
    ControlledCase("minority", MINORITY_GAME, ControllerSpec(G2, Family.PHI2, 0.1, 1.0, 0.1), 0.99, 100.0),
)


def controlled_case(name: str) -> ControlledCase:
    for case in CONTROLLED_CASES:
        if case.name == name:
            return case
    raise KeyError(name)


def uncontrolled_runs(t_end: float = 10.0) -> dict[str, list[Trajectory]]:
    cfg = IntegratorConfig(dt=1e-3, t_end=t_end, record_every=20)
    return {
        name: [integrate(ControlledSystem(m), SystemState(x0, 0.0), cfg) for x0 in UNCONTROLLED_X0]
        for name, m in UNCONTROLLED_GAMES.items()
    }


def write_figures(out_dir: str | Path, formats=("svg", "png")) -> list[Path]:
    """Render both reference figures plus their CSV data into ``out_dir``."""
    from .plotting import plot_controlled_panels, plot_share_panels

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    unc = uncontrolled_runs()
    for name, trajs in unc.items():
        for x0, traj in zip(UNCONTROLLED_X0, trajs):
            path = out / f"uncontrolled_{name}_x0_{x0:g}.csv"
            write_trajectory_csv(traj, path)
            written.append(path)
    written += plot_share_panels(
        list(unc.items()), [out / f"uncontrolled.{fmt}" for fmt in formats]
    )
    panels = []
    for case in CONTROLLED_CASES:
        traj = case.run()
        path = out / f"controlled_{case.name}.csv"
        write_trajectory_csv(traj, path)
        written.append(path)
        panels.append((f"{case.name} (k={case.spec.k:g}, h={case.spec.h:g})", traj))
    written += plot_controlled_panels(panels, [out / f"controlled.{fmt}" for fmt in formats])
    return written
