import pytest

from hypunitary.formring import build_zmod, make_form_ring
from hypunitary.groups import Engine

# criterion number -> (description, passed); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def record(number: int, description: str, passed: bool):
    ACCEPTANCE[number] = (description, passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        desc, ok = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {desc}")


@pytest.fixture(scope="session")
def z2_engines():
    """Engines for Z/2 (lambda=1) with Lambda = {0} and Lambda = Z/2, U enumerated once."""
    R = build_zmod(2)
    out = {}
    for name in ("min", "max"):
        E = Engine(make_form_ring(R, 1, name), 3)
        E.enumerate_U()
        out[name] = E
    return out


@pytest.fixture(scope="session")
def z2_small(z2_engines):
    return z2_engines["min"]


@pytest.fixture(scope="session")
def z2_big(z2_engines):
    return z2_engines["max"]
