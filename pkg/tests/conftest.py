import math

import numpy as np
import pytest

from rdrmesh import _kernels
from rdrmesh.meshcore import Mesh

_acceptance_lines = []


def record_acceptance(line: str):
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


KERNEL_BACKENDS = [pytest.param(_kernels.fallback, id="python")]
if _kernels.compiled is not None:
    KERNEL_BACKENDS.append(pytest.param(_kernels.compiled, id="cython"))


@pytest.fixture(params=KERNEL_BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def equilateral():
    return Mesh([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]], [[0, 1, 2]])


@pytest.fixture
def hexagon_fan():
    """Centre vertex 0 surrounded by six equilateral triangles."""
    rim = [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]
    tris = [[0, 1 + k, 1 + (k + 1) % 6] for k in range(6)]
    return Mesh(np.array([(0.0, 0.0), *rim]), tris)
