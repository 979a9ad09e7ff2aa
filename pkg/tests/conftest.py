import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import problems  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def regression_specs():
    return problems.regression_specs()


@pytest.fixture
def smooth_suite():
    return problems.smooth_suite()
