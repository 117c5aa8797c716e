import pytest

from hypercount._kernels import compiled_backend, python_backend

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_LINES, key=int):
        terminalreporter.write_line(ACCEPTANCE_LINES[cid])


BACKENDS = [python_backend] + ([compiled_backend] if compiled_backend is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda b: b.NAME)
def backend(request):
    return request.param
