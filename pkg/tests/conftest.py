import math

import pytest

# one point per structure, (c, b1, b2) with b2 = 1
REGIME_POINTS = {
    "A": (0.5, 1.2, 1.0),
    "B": (1.1, 1.2, 1.0),
    "C": (1.3, 1.05, 1.0),
    "D": (2.0, 1.2, 1.0),
    "E": (10.0, 1.4, 1.0),
    "Dp": (3.0, 2.0, 1.0),
    "Ep": (10.0, 2.0, 1.0),
}

DELTA_EG = math.sqrt(5 / 3) - 1


@pytest.fixture(params=sorted(REGIME_POINTS))
def regime_point(request):
    return request.param, REGIME_POINTS[request.param]


# criterion id -> (passed, detail); filled by test_acceptance and printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
