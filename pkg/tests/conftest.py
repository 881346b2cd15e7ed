import pytest

from imkit.expr import parse
from imkit.vfield import AffineSystem

ECOLI_PARAMS = ("a1", "a2", "a3", "a4", "a5", "a6")
ECOLI_DOMAIN = ((1e-3, 10.0), (1e-3, 10.0))
UNIT_PARAMS = {name: 1.0 for name in ECOLI_PARAMS}


def make_ecoli(params=ECOLI_PARAMS) -> AffineSystem:
    f = [
        parse("a1 - a2*x1 + a3*x2", 2, params),
        parse("a5 - a6*x2", 2, params),
    ]
    g = [parse("-a4*x1", 2, params), parse("a4*x1", 2, params)]
    h = parse("(a1 + a5) - (a2*x1 + (a6 - a3)*x2)", 2, params)
    return AffineSystem.build(f, g, h, 2, params, ECOLI_DOMAIN)


def make_ecoli_unit() -> AffineSystem:
    f = [parse("1 - x1 + x2", 2), parse("1 - x2", 2)]
    g = [parse("-x1", 2), parse("x1", 2)]
    h = parse("2 - x1", 2)
    return AffineSystem.build(f, g, h, 2, (), ECOLI_DOMAIN)


@pytest.fixture(scope="session")
def ecoli():
    return make_ecoli()


@pytest.fixture(scope="session")
def ecoli_unit():
    return make_ecoli_unit()
