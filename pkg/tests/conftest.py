import sys
from pathlib import Path

import pytest
from hypothesis import settings

from igusa2d.poly import Poly2

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

INPUTS = Path(__file__).resolve().parent.parent / "inputs"


def cusp(a: int = 1, b: int = 1, alpha=1) -> Poly2:
    """y^a - alpha*x^b"""
    return Poly2({(0, a): 1, (b, 0): -alpha})


def model_f() -> Poly2:
    return cusp(3, 2) ** 2 + Poly2.mono(4, 4)


def model_g(a) -> Poly2:
    return cusp(3, 2) ** 2 * cusp(3, 2, a) + Poly2.mono(4, 4)


def arith_degenerate() -> Poly2:
    c = cusp(3, 2)
    return c**5 + c**3 * Poly2.mono(6, 3) + c**2 * Poly2.mono(12, 0) + Poly2.mono(24, 0)


def three_roots(a, b) -> Poly2:
    c = cusp(5, 3)
    return c**4 * cusp(5, 3, a) * cusp(5, 3, b) + Poly2.mono(20, 0)


@pytest.fixture
def f31():
    return model_f()


@pytest.fixture
def inputs_dir():
    return INPUTS
