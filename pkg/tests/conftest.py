import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tailsim.engine import SimulationPlan, simulate  # noqa: E402
from tailsim.terms import CASE_STUDY_CONTRACTS  # noqa: E402

SWEEP_K = tuple(np.round(np.arange(1.0, 3.0001, 0.25), 2))


@pytest.fixture(scope="session")
def case_study_sweep():
    """Published case-study setup, 10^6 trials, riemann mode, k = 1.0..3.0 step 0.25."""
    plan = SimulationPlan(
        num_trials=10**6,
        lam=3.0,
        severity_mean=10.0,
        severity_sd=30.0,
        k_values=SWEEP_K,
        contracts=CASE_STUDY_CONTRACTS,
    )
    return simulate(plan)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(RESULTS, key=lambda s: int(s.split()[0][1:])):
        ok, detail = RESULTS[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
