import pytest
from hypothesis import HealthCheck, settings

from doorrmst import kernels

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("suite")


def _available_backends():
    names = ["numpy"]
    try:
        kernels.load_backend("numba")
    except Exception:
        return names
    names.append("numba")
    return names


AVAILABLE_BACKENDS = _available_backends()


@pytest.fixture(params=AVAILABLE_BACKENDS)
def backend(request, monkeypatch):
    """Runs the test once per importable kernel backend."""
    chosen = kernels.load_backend(request.param)
    monkeypatch.setattr(kernels, "_active", chosen)
    return chosen


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = {}
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" in rep.nodeid:
                name = rep.nodeid.split("::")[-1]
                if label == "FAIL" or name not in lines:
                    lines[name] = label
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(lines):
            terminalreporter.write_line(f"{name}: {lines[name]}")
