import pytest
from hypothesis import given, settings, strategies as st

from qlstar.fixtures import fixture_form
from qlstar.qform import (
    CsValue, FormError, GramForm, basis, cs_vectors, decompose, eval_b, eval_q, is_ql_vectors,
    vadd, validate, vector, vscale,
)
from qlstar.tscalar import DENSE, DISCRETE, GHOST, TANGIBLE, Scalar, add, mul, square, zero

B = fixture_form("B")


def e_(i, n=3, spec=DISCRETE):
    return basis(n, i, spec)


def test_fixture_b_values():
    y = vadd(e_(1), e_(2))
    assert str(eval_q(B, y)) == "t:1"
    assert str(eval_b(B, e_(0), y)) == "g:1"
    assert str(eval_b(B, e_(1), e_(1))) == "g:0"
    assert eval_b(B, e_(0), vector(["0", "0", "0"], DISCRETE)) == zero(DISCRETE)
    assert eval_q(B, vector(["0", "0", "0"], DISCRETE)) == zero(DISCRETE)


def test_fixture_b_cs_values():
    assert cs_vectors(B, e_(0), vadd(e_(1), e_(2))) == CsValue(1)
    assert cs_vectors(B, e_(1), e_(2)) == CsValue(2)
    assert cs_vectors(B, e_(1), e_(1)) == CsValue(0)


def test_fixture_b_pair_not_quasilinear():
    assert str(eval_q(B, vadd(e_(0), e_(1)))) == "t:1"
    assert not is_ql_vectors(B, e_(0), e_(1))
    assert is_ql_vectors(B, e_(1), e_(1))


def test_validation():
    assert validate(B).ok
    with pytest.raises(FormError, match="isotropic"):
        GramForm(["t:0", "0"], None, "balanced", DENSE)
    with pytest.raises(FormError, match="companion"):
        GramForm(["t:0"], None, ["t:5"], DENSE)


def test_decompose_fixture_b():
    ql, rigid = decompose(B)
    assert [str(s) for s in ql.diag] == ["g:0"] * 3
    assert not ql.cross
    assert sorted((k, str(v)) for k, v in rigid.cross.items()) == [
        ((0, 1), "t:1"), ((0, 2), "t:1"), ((1, 2), "t:1")]
    diag = GramForm(["t:0", "t:1"], None, "balanced", DENSE)
    assert not decompose(diag)[1].cross


def test_diagonal_form_is_quasilinear_everywhere():
    f = GramForm(["t:0", "t:2", "g:1"], None, "balanced", DENSE)
    x = vector(["t:1", "0", "g:-1"])
    y = vector(["t:-3", "t:5", "t:0"])
    assert is_ql_vectors(f, x, y)


def test_json_uses_one_based_cross():
    assert B.to_json()["cross"][0] == [1, 2, "t:1"]


def forms_and_vectors():
    mags = st.sampled_from([0, 1, 5])
    tags = st.sampled_from([TANGIBLE, GHOST])

    @st.composite
    def build(draw):
        n = draw(st.integers(2, 4))
        spec = draw(st.sampled_from([DENSE, DISCRETE]))
        diag = [Scalar(draw(tags), draw(mags), spec) for _ in range(n)]
        cross = [(i, j, Scalar(draw(tags), draw(mags), spec)) for i in range(n) for j in range(i + 1, n)]
        f = GramForm(diag, cross, "balanced", spec)
        entry = st.one_of(st.just(zero(spec)), st.builds(lambda t, m: Scalar(t, m, spec), tags,
                                                          st.integers(-4, 4)))
        x = vector(draw(st.lists(entry, min_size=n, max_size=n)), spec)
        y = vector(draw(st.lists(entry, min_size=n, max_size=n)), spec)
        return f, x, y
    return build()


@settings(max_examples=300)
@given(forms_and_vectors())
def test_companion_identity(fxy):
    f, x, y = fxy
    assert eval_q(f, vadd(x, y)) == add(add(eval_q(f, x), eval_q(f, y)), eval_b(f, x, y))


@given(forms_and_vectors(), st.integers(-3, 3))
def test_homogeneity(fxy, m):
    f, x, y = fxy
    a = Scalar(TANGIBLE, m, f.spec)
    assert eval_q(f, vscale(a, x)) == mul(square(a), eval_q(f, x))
    assert eval_b(f, vscale(a, x), y) == mul(a, eval_b(f, x, y))


@given(forms_and_vectors(), st.integers(-3, 3), st.integers(-3, 3))
def test_cs_is_invariant_under_rescaling(fxy, m1, m2):
    f, x, y = fxy
    if x.is_zero() or y.is_zero():
        return
    lam, mu = Scalar(TANGIBLE, m1, f.spec), Scalar(GHOST, m2, f.spec)
    assert cs_vectors(f, vscale(lam, x), vscale(mu, y)) == cs_vectors(f, x, y)
