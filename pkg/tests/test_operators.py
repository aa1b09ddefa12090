from fractions import Fraction

from locuslab.operators import DiffOp, ad_power, ad_scale
from locuslab.scalar import FieldTower
from locuslab.symbolic import K_BLOCK, MultiPoly, RationalFn, Space

TOWER = FieldTower()


def rat(space, poly):
    return RationalFn.from_poly(poly)


def derivative(space, index):
    return DiffOp(space, TOWER, {index: RationalFn.constant(space, TOWER, 1)})


def test_canonical_commutator():
    space = Space.plain(["x"])
    x = MultiPoly.variable(space, TOWER, 0)
    d = derivative(space, (1,))
    bracket = d.commutator(DiffOp.multiplication(rat(space, x)))
    assert list(bracket.terms) == [(0,)]
    assert bracket.terms[(0,)] == 1


def test_compose_is_associative_on_a_sample():
    space = Space.plain(["x1", "x2"])
    x1 = MultiPoly.variable(space, TOWER, 0)
    a = derivative(space, (1, 0))
    b = DiffOp.multiplication(rat(space, x1 ** 2))
    c = derivative(space, (1, 1))
    left = a.compose(b).compose(c)
    right = a.compose(b.compose(c))
    assert (left - right).is_zero()


def test_schrodinger_apply():
    space = Space.plain(["x"])
    x = MultiPoly.variable(space, TOWER, 0)
    free = DiffOp.schrodinger(RationalFn.constant(space, TOWER, 0))
    assert free.order == 2
    assert free.apply(rat(space, x ** 2)) == -2


def test_apply_exponential_plane_wave():
    space = Space.phase(1)
    k = MultiPoly.variable(space, TOWER, 1)
    free = DiffOp.schrodinger(RationalFn.constant(space, TOWER, 0))
    one = RationalFn.constant(space, TOWER, 1)
    assert free.apply_exponential(one) == rat(space, -(k ** 2))


def test_apply_exponential_in_k_block():
    space = Space.phase(1)
    x = MultiPoly.variable(space, TOWER, 0)
    d_k = DiffOp(space, TOWER, {(1,): RationalFn.constant(space, TOWER, 1)}, K_BLOCK)
    one = RationalFn.constant(space, TOWER, 1)
    assert d_k.apply_exponential(one) == rat(space, x)


def test_ad_power_of_derivative():
    space = Space.plain(["x"])
    x = MultiPoly.variable(space, TOWER, 0)
    d = derivative(space, (1,))
    cube = DiffOp.multiplication(rat(space, x ** 3))
    result = ad_power(d, cube, 3)
    assert result.terms[(0,)] == 6
    assert ad_power(d, cube, 4).is_zero()


def test_ad_scale():
    assert ad_scale(0) == 1
    assert ad_scale(1) == Fraction(-1, 2)
    assert ad_scale(2) == Fraction(1, 8)
    assert ad_scale(3) == Fraction(-1, 48)


def test_format():
    space = Space.plain(["x"])
    assert derivative(space, (2,)).format() == "(1)*dx**2"
    assert DiffOp(space, TOWER).format() == "0"
