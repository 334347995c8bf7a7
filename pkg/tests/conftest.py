import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sup(values):
    """Largest magnitude of a float or mpf array, as a float."""
    return float(np.max(np.abs(np.asarray([float(v) for v in np.ravel(values)]))))


ACCEPTANCE: dict[int, str] = {}


def record_acceptance(number: int, title: str, value: float, tol: float, passed: bool | None = None):
    """Store the outcome line for one acceptance criterion and return whether it passed."""
    ok = bool(value < tol) if passed is None else bool(passed)
    ACCEPTANCE[number] = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {value:.3e} (tolerance {tol:.1e})"
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
