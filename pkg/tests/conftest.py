import numpy as np
import pytest

from ecokin import _kernels_py
from ecokin._backend import compiled_kernels


def _backends():
    out = [pytest.param(_kernels_py, id="python")]
    compiled = compiled_kernels()
    if compiled is not None:
        out.append(pytest.param(compiled, id="cython"))
    return out


@pytest.fixture(params=_backends())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for ln in sorted(lines, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(ln)
