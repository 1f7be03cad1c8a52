import math

import numpy as np
import pytest

from oam_metrology.operator_algebra import Arm, ModeId, Sign

_CRITERIA: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str = "") -> bool:
    prev = _CRITERIA.get(criterion)
    if prev is not None:
        ok = ok and prev[0]
        detail = "; ".join(d for d in (prev[1], detail) if d)
    _CRITERIA[criterion] = (bool(ok), detail)
    return ok


@pytest.fixture
def criterion():
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split()[0])):
        ok, detail = _CRITERIA[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}  {detail}")


def out(letter: str, l: int = 1) -> ModeId:
    return ModeId.parse(letter, l)


@pytest.fixture
def modes():
    return {
        "s+": ModeId(Arm.SIGNAL, Sign.PLUS),
        "s-": ModeId(Arm.SIGNAL, Sign.MINUS),
        "i+": ModeId(Arm.IDLER, Sign.PLUS),
        "i-": ModeId(Arm.IDLER, Sign.MINUS),
        "a+": ModeId(Arm.OUT_A, Sign.PLUS),
        "a-": ModeId(Arm.OUT_A, Sign.MINUS),
        "b+": ModeId(Arm.OUT_B, Sign.PLUS),
        "b-": ModeId(Arm.OUT_B, Sign.MINUS),
    }


@pytest.fixture
def theta_grid():
    return np.linspace(0, math.pi, 361)
