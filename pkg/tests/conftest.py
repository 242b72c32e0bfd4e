from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from loomalg.algcore import load_algebra, validate_sigma_tuple
from loomalg.multiloop import Multiloop

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "loomalg" / "fixtures"
DATA = Path(__file__).resolve().parent / "data"

SL2 = {"name": "sl2", "basis": ["e", "h", "f"], "kind": "bracket",
       "products": [("h", "e", {"e": 2}), ("h", "f", {"f": -2}), ("e", "f", {"h": 1})]}
KXK = {"name": "kxk", "basis": ["p", "q"], "kind": "product",
       "products": [("p", "p", {"p": 1}), ("q", "q", {"q": 1})]}
IDEM1 = {"name": "idem1", "basis": ["u"], "products": [("u", "u", {"u": 1})]}
ABELIAN1 = {"name": "abelian1", "basis": ["x"], "kind": "bracket", "products": []}

OMEGA = [[0, 0, -1], [0, -1, 0], [-1, 0, 0]]


def ident(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def sl2(m=1):
    return load_algebra(SL2, m)


def multiloop(desc, sigmas, orders, m=None):
    import math
    A = load_algebra(desc, m or math.lcm(*orders))
    return Multiloop(A, validate_sigma_tuple(A, sigmas, orders))


def twisted_sl2():
    return multiloop(SL2, [OMEGA], [2])


def untwisted_sl2():
    return multiloop(SL2, [ident(3)], [1])


@pytest.fixture(scope="session")
def L_tw():
    return twisted_sl2()


@pytest.fixture(scope="session")
def L_un():
    return untwisted_sl2()


@pytest.fixture(scope="session")
def L_two():
    return multiloop(SL2, [OMEGA, ident(3)], [2, 1])
