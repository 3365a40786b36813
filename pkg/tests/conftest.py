from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from adaptgain.controller import G1, ControllerSpec, Family
from adaptgain.dynamics import ControlledSystem
from adaptgain.game import PURE_COORDINATION

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def coord_sys() -> ControlledSystem:
    """Coordination game alpha=beta=1 under (G1, phi1), k=1, h=0.4, g0=0.2."""
    return ControlledSystem(PURE_COORDINATION, ControllerSpec(G1, Family.PHI1, 1.0, 0.4, 0.2))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fig2a_reference():
    """Terminal state of the coordination controller run at dt=1e-6 (t_end=50)."""
    from adaptgain.dynamics import SystemState
    from adaptgain.integrator import IntegratorConfig, integrate

    sys = ControlledSystem(PURE_COORDINATION, ControllerSpec(G1, Family.PHI1, 1.0, 0.4, 0.2))
    cfg = IntegratorConfig(dt=1e-6, t_end=50.0, record_every=50_000_000)
    return integrate(sys, SystemState(0.99, 0.2), cfg, label=False).terminal


def terminal_error(state, ref) -> float:
    """Largest relative deviation of a terminal state from a reference state."""
    return max(abs(state.x - ref.x) / abs(ref.x), abs(state.g - ref.g) / abs(ref.g))


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
