from fractions import Fraction

from hypothesis import strategies as st

from locuslab.scalar import FieldTower, TowerScalar, adjoin_sqrt
from locuslab.symbolic import MultiPoly, Space

TOWER = FieldTower([2, 3])
_, R2 = adjoin_sqrt(TOWER, 2)
_, R3 = adjoin_sqrt(TOWER, 3)
BASIS = [TOWER.one(), R2, R3, R2 * R3]


def fractions(bound: int = 20):
    return st.fractions(min_value=-bound, max_value=bound, max_denominator=bound)


@st.composite
def scalars(draw, nonzero: bool = False):
    """Elements of Q(i, r2, r3)"""
    total = TOWER.zero()
    for element in BASIS:
        re_part = draw(fractions())
        im_part = draw(fractions())
        total = total + element * TowerScalar.from_gaussian(TOWER, Fraction(re_part), Fraction(im_part))
    if nonzero and not total:
        total = TOWER.one()
    return total


def small_space() -> Space:
    return Space.phase(2)


@st.composite
def polynomials(draw, space=None, max_terms: int = 4, max_degree: int = 2):
    """Sparse polynomials over Space.phase(2) with tower coefficients"""
    space = space or small_space()
    total = MultiPoly.constant(space, TOWER, 0)
    for _ in range(draw(st.integers(0, max_terms))):
        term = MultiPoly.constant(space, TOWER, draw(scalars()))
        for var in range(space.nvars):
            power = draw(st.integers(0, max_degree))
            if power:
                term = term * MultiPoly.variable(space, TOWER, var) ** power
        total = total + term
    return total
