import pytest

from dualcs.fock import HO1D, ModelParams

PRESETS = {
    "ho1d": HO1D,
    "su11": ModelParams((), (2.0,)),
    "geometric": ModelParams((3.0,), ()),
}

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=sorted(PRESETS))
def preset(request):
    return request.param, PRESETS[request.param]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
