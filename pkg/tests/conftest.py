import numpy as np
import pytest

from qednonlin.params import REFERENCE_DEVICE, derive_params


@pytest.fixture(scope="session")
def d():
    return derive_params(REFERENCE_DEVICE)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    """Collect per-criterion outcomes; a criterion passes only if all its parts do."""
    prev_ok, prev = ACCEPTANCE.get(criterion, (True, []))
    ACCEPTANCE[criterion] = (prev_ok and ok, prev + [detail])
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, details = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: " + "; ".join(details))
