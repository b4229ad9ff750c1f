import cmath
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from ablowitz_ladik import BoundaryParams, ModelParams  # noqa: E402

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def _polar(lo, hi):
    return st.builds(lambda m, a: complex(m * cmath.exp(1j * a)),
                     st.floats(lo, hi), st.floats(-np.pi, np.pi))


# spectral parameter on a moderate annulus, away from the r-matrix poles z^2 = 1
spectral = _polar(0.6, 1.7).filter(lambda z: abs(1 - z * z) > 0.2)
small_complex = _polar(0.0, 0.4)
unit_scale = _polar(0.5, 1.2)

models = st.builds(
    lambda a, b, g: ModelParams(a, b, g),
    _polar(0.4, 1.0), _polar(0.4, 1.0), _polar(0.0, 0.4),
)
boundaries = st.builds(BoundaryParams, unit_scale, unit_scale, unit_scale, unit_scale)


def fields(n_lo=1, n_hi=5):
    return st.integers(n_lo, n_hi).flatmap(
        lambda n: st.tuples(st.lists(small_complex, min_size=n, max_size=n),
                            st.lists(small_complex, min_size=n, max_size=n)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def dnls():
    return ModelParams.dnls()


_ACCEPTANCE = pytest.StashKey()


@pytest.fixture
def acceptance_report(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, line):
        lines[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
