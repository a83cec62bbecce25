from fractions import Fraction as F
from pathlib import Path

import pytest

from ensemble_lab.prob import make_space, uniform_space

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data():
    return DATA


@pytest.fixture
def p3():
    return make_space("xyz", {"x": F(1, 2), "y": F(1, 3), "z": F(1, 6)})


@pytest.fixture
def u2():
    return uniform_space("01")
