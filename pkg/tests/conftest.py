import pytest
from hypothesis import HealthCheck, settings

from pvcoh.approximants import build_proper_sequence
from pvcoh.tiling import cut_and_project_sample, e_minus_two, fibonacci_rule, golden, silver, substitution_sample

settings.register_profile("pvcoh", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pvcoh")


@pytest.fixture(scope="session")
def golden_sample():
    return cut_and_project_sample(golden(), 3000)


@pytest.fixture(scope="session")
def golden_seq5(golden_sample):
    # one level more than the hull computation uses, for the mixed-level relations
    return build_proper_sequence(golden_sample, 5)


@pytest.fixture(scope="session")
def silver_seq5():
    return build_proper_sequence(cut_and_project_sample(silver(), 3000), 5)


@pytest.fixture(scope="session")
def e_seq5():
    return build_proper_sequence(cut_and_project_sample(e_minus_two(), 3000), 5)


@pytest.fixture(scope="session")
def fib_sample():
    return substitution_sample(fibonacci_rule(), "a", 16)


@pytest.fixture(scope="session")
def small_golden_seq():
    return build_proper_sequence(cut_and_project_sample(golden(), 1000), 3)


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Record one outcome per acceptance criterion for the terminal summary."""
    def record(n, ok, detail=""):
        _ACCEPTANCE[n] = (ok, detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
