import os

import hypothesis
import numpy as np
import pytest

from core.grid import Grid1D

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture
def grid():
    return Grid1D(1024, 100.0)


@pytest.fixture
def small_grid():
    return Grid1D(64, 16.0)
