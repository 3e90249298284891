import numpy as np
import pytest

from ncclark import _kernels
from ncclark import builtins as B


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run the test once per kernel implementation."""
    monkeypatch.setattr(_kernels, "BACKEND", request.param)
    return request.param


QE_BUILTINS = {
    "coordinate": lambda: B.coordinate(2),
    "cuntz": lambda: B.cuntz([0.6, 0.8j]),
    "one-var-z2": lambda: B.one_var([0, 0, 1], 2),
}


@pytest.fixture(params=sorted(QE_BUILTINS))
def qe_builtin(request):
    return QE_BUILTINS[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
