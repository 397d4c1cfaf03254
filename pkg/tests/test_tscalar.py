from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qlstar.tscalar import (
    DENSE, DISCRETE, GHOST, TANGIBLE, Scalar, SemifieldError, add, c0, e, eq_nu, format_scalar,
    ghost, le_nu, lt_nu, mul, nu, parse_scalar, square, tangible, tsum, zero,
)


def scalars(spec):
    mags = st.integers(-6, 6) if spec.discrete else st.fractions(-6, 6, max_denominator=4)
    nonzero = st.builds(lambda t, m: Scalar(t, m, spec), st.sampled_from([TANGIBLE, GHOST]), mags)
    return st.one_of(st.just(zero(spec)), nonzero)


def test_addition_examples():
    assert add(tangible(1), tangible(3)) == tangible(3)
    assert add(tangible(2), ghost(2)) == ghost(2)
    assert add(tangible(5), zero()) == tangible(5)
    assert add(tangible(4), tangible(4)) == ghost(4)


def test_multiplication_examples():
    assert mul(tangible(1), tangible(2)) == tangible(3)
    assert mul(tangible(1), ghost(2)) == ghost(3)
    assert mul(ghost(0), ghost(0)) == ghost(0)
    assert mul(zero(), tangible(9)) == zero()


def test_ghost_map_and_square():
    assert nu(tangible(3)) == ghost(3)
    assert nu(ghost(3)) == ghost(3)
    assert nu(zero()) == zero()
    assert square(tangible(3)) == tangible(6)
    assert square(ghost(1, DISCRETE)) == ghost(2, DISCRETE)
    # c0 squared sits strictly above c0
    assert lt_nu(c0(DISCRETE), square(c0(DISCRETE)))
    s = add(tangible(1), tangible(2))
    assert square(s) == add(square(tangible(1)), square(tangible(2))) == tangible(4)


def test_nu_order():
    assert le_nu(tangible(1), ghost(1))
    assert lt_nu(zero(), tangible(-7))
    assert eq_nu(ghost(2), tangible(2))
    assert not lt_nu(ghost(2), tangible(2))


def test_e_is_idempotent():
    assert e() == ghost(0)
    assert add(e(), e()) == e()
    assert mul(e(), e()) == e()
    assert add(tangible(0), tangible(0)) == e()


def test_dense_has_no_c0():
    with pytest.raises(SemifieldError):
        DENSE.c0


def test_discrete_rejects_fractions():
    with pytest.raises(SemifieldError):
        tangible(Fraction(1, 2), DISCRETE)
    assert tangible(Fraction(1, 2)).mag == Fraction(1, 2)


def test_mixed_specs_rejected():
    with pytest.raises(SemifieldError):
        add(tangible(1, DENSE), tangible(1, DISCRETE))


@pytest.mark.parametrize("text", ["t:3/2", "g:-1", "0", "t:0", "g:7"])
def test_parse_format_round_trip(text):
    assert format_scalar(parse_scalar(text)) == text


@pytest.mark.parametrize("text", ["x:1", "t:", "t:1.5", "g:1/0", "", "tt:1"])
def test_parse_rejects(text):
    with pytest.raises(SemifieldError):
        parse_scalar(text)


def test_tsum_of_ties():
    assert tsum([tangible(1), tangible(0), tangible(1)]) == ghost(1)
    assert tsum([]) == zero()


@pytest.mark.parametrize("spec", [DENSE, DISCRETE])
@given(data=st.data())
def test_semiring_laws(spec, data):
    a, b, c = (data.draw(scalars(spec)) for _ in range(3))
    assert add(a, b) == add(b, a)
    assert mul(a, b) == mul(b, a)
    assert add(add(a, b), c) == add(a, add(b, c))
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    assert square(add(a, b)) == add(square(a), square(b))
    assert mul(e(spec), a) == nu(a)
    assert add(a, a) == nu(a)


@pytest.mark.parametrize("spec", [DENSE, DISCRETE])
@given(data=st.data())
def test_square_is_injective(spec, data):
    a, b = data.draw(scalars(spec)), data.draw(scalars(spec))
    if square(a) == square(b):
        assert a == b
