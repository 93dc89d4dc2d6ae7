import math

import numpy as np
import pytest
from hypothesis import settings

from filippov_contraction.flow import IntegratorCfg
from filippov_contraction.geometry import SystemDef

# wall-clock deadlines are noise on a shared single core
settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


@pytest.fixture
def builtin():
    return SystemDef(mu=1.8, alpha=0.1)


@pytest.fixture
def builtin_4pi():
    return SystemDef(mu=1.8, alpha=0.1, period=4 * math.pi)


@pytest.fixture
def rk4():
    return IntegratorCfg()


class SyntheticSystem(SystemDef):
    """Constant branch fields and Jacobians, for checks that need asymmetric data."""

    def __init__(self, fp, fm, jp=None, jm=None):
        super().__init__(mu=1.0, alpha=1.0)
        object.__setattr__(self, "_fp", np.asarray(fp, float))
        object.__setattr__(self, "_fm", np.asarray(fm, float))
        object.__setattr__(self, "_jp", np.zeros((2, 2)) if jp is None else np.asarray(jp, float))
        object.__setattr__(self, "_jm", np.zeros((2, 2)) if jm is None else np.asarray(jm, float))

    def branches(self, t, x):
        shape = np.broadcast_shapes(np.shape(t), np.shape(x)[:-1]) + (2,)
        return np.broadcast_to(self._fp, shape).copy(), np.broadcast_to(self._fm, shape).copy()

    def branch_jacobian(self, t, x, side):
        j = self._jp if side > 0 else self._jm
        return np.broadcast_to(j, np.shape(x)[:-1] + (2, 2)).copy()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
