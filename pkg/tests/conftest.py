import pytest

from hkcurves import FieldSpec, parse_poly


@pytest.fixture(scope="session")
def gf2():
    return FieldSpec(2)


@pytest.fixture(scope="session")
def gf3():
    return FieldSpec(3)


@pytest.fixture(scope="session")
def gf4():
    return FieldSpec(2, 2)


@pytest.fixture(scope="session")
def gf5():
    return FieldSpec(5)


@pytest.fixture(scope="session")
def gf9():
    return FieldSpec(3, 2)


@pytest.fixture(scope="session")
def monsky2_g1(gf2):
    """g_alpha with alpha = 1: the characteristic-2 quartic workhorse."""
    return parse_poly("x^2*y^2 + z^4 + x*y*z^2 + (x^3+y^3)*z", gf2)


@pytest.fixture(scope="session")
def monsky3_f2(gf3):
    """f_lambda with lambda = 2: the characteristic-3 quartic workhorse."""
    return parse_poly("z^4 - x*y*(x+y)*(x+2*y)", gf3)


@pytest.fixture(scope="session")
def nodal_cubic(gf5):
    return parse_poly("y^2*z - x^3 - x^2*z", gf5)


@pytest.fixture(scope="session")
def triple_point_quartic(gf5):
    return parse_poly("y^3*z - x^4", gf5)
