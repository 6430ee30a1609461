import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nvsr import default_filterbank
from nvsr.signals import speech_like

settings.register_profile(
    "suite",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def fb():
    return default_filterbank()


@pytest.fixture(scope="session")
def speech():
    """One deterministic speech-shaped utterance shared across tests."""
    return speech_like(0.9, seed=7)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE_LINES: list[str] = []


class AcceptanceRecorder:
    """Collects one verdict line per acceptance criterion.

    Lines are echoed immediately (visible in captured output on failure) and
    replayed in the terminal summary so a plain ``pytest -v`` run always shows
    the per-criterion verdicts.
    """

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        status = "PASS" if ok else "FAIL"
        line = f"[ACCEPTANCE] {name}: {status}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    def skip(self, name: str, reason: str) -> None:
        line = f"[ACCEPTANCE] {name}: SKIP  ({reason})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        pytest.skip(reason)


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
