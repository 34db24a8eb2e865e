import numpy as np
import pytest

import rstokes as rs

# acceptance tests register one line each; printed in the terminal summary
_ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker:
        label = marker.kwargs.get("label", item.name)
        _ACCEPTANCE_RESULTS[label] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label in sorted(_ACCEPTANCE_RESULTS):
        status = _ACCEPTANCE_RESULTS[label]
        terminalreporter.write_line(f"{status}  {label}")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(label): acceptance criterion, reported in the summary"
    )


# ---------------------------------------------------------------------------
# shared fixtures: threshold estimates are expensive, compute once per session
# (they are also lru-cached inside the module, so cross-module reuse is free)

CERT_BRACKET = (0.095, 0.905)


def certificate_alpha_grid(lo=CERT_BRACKET[0], hi=CERT_BRACKET[1]):
    interior = lo + (hi - lo) * np.arange(1, 20) / 20.0
    return tuple(np.concatenate(([lo], interior, [hi])))


@pytest.fixture(scope="session")
def t0_certified():
    """Threshold estimate for gamma = 1, lambda1 = 1 on the certification
    bracket used by the inverse tests."""
    return rs.estimate_threshold_time(1.0, 1.0, certificate_alpha_grid())


@pytest.fixture(scope="session")
def quad():
    return rs.QuadratureConfig()
