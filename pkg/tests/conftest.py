import pytest

from epiident.models import EpidemicParams, ModelKind

MASTER_TAU = 0.1429
MASTER_N = 6.0
GAMMA = 1 / 7
N_POP = 10000.0


@pytest.fixture
def master_pairwise():
    return EpidemicParams.seeded(ModelKind.PAIRWISE_NM1, MASTER_TAU, GAMMA, MASTER_N, N_POP, 1.0)


@pytest.fixture(params=list(ModelKind), ids=lambda k: k.value)
def kind(request):
    return request.param


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
