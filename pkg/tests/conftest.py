import numpy as np
import pytest

from qexpander.channel import Channel
from qexpander.generators import cyclic_cayley_channel, weyl_channel

# criterion id -> list of (label, passed) filled in by test_acceptance
ACCEPTANCE = {}


def record(criterion, label, passed):
    ACCEPTANCE.setdefault(criterion, []).append((label, bool(passed)))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        ok = all(p for _, p in parts)
        failing = [lbl for lbl, p in parts if not p]
        line = f"criterion {crit}: {'PASS' if ok else 'FAIL'}"
        if failing:
            line += "  (failing: " + "; ".join(failing) + ")"
        terminalreporter.write_line(line)


@pytest.fixture
def pauli():
    return weyl_channel(2)


@pytest.fixture
def identity2():
    return Channel((np.eye(2),))


@pytest.fixture
def cayley5():
    return cyclic_cayley_channel(5, [1, 4])
