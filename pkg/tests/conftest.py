import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qwperturb.sweep import random_general_chain, random_symmetric_chain  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sym_chain(rng):
    def make(n):
        return random_symmetric_chain(rng, n)

    return make


@pytest.fixture
def gen_chain(rng):
    def make(n, tau_max=0.9):
        return random_general_chain(rng, n, tau_max)

    return make
