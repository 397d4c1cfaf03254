import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qlstar.fixtures import basis_rays, chain_form, fixture_form
from qlstar.qform import CsValue, eval_q, vector
from qlstar.qlcore import is_ql_pair
from qlstar.rayspace import (
    RayError, cs_rays, format_ray, g_isotropy, hull_cell, hull_member, interval_member,
    interval_skeleton, is_g_isotropic, make_ray, parse_ray, point_on_interval, principal_shifts,
    ray_from_json, ray_of, ray_to_json, recover_endpoints, representatives, sample_hull,
)
from qlstar.tscalar import DISCRETE

B, C = fixture_form("B"), fixture_form("C")
X = basis_rays(3)

profiles = st.lists(st.one_of(st.none(), st.integers(-5, 5)), min_size=2, max_size=4).filter(
    lambda p: any(v is not None for v in p))


def test_normalization():
    assert ray_of(vector(["t:2", "g:5", "0"])) == make_ray([-3, 0, None])
    assert format_ray(make_ray([Fraction(1, 2), None, 3])) == "(-5/2, _, 0)"
    with pytest.raises(RayError):
        make_ray([None, None])
    with pytest.raises(RayError):
        make_ray([Fraction(1, 2), 0], DISCRETE)


def test_representatives_of_single_support():
    reps = representatives(make_ray([0, None]))
    assert [str(v) for v in reps] == ["(t:0, 0)", "(g:0, 0)"]


@given(profiles)
def test_text_and_json_round_trip(p):
    r = make_ray(p)
    assert parse_ray(format_ray(r)) == r
    assert ray_from_json(ray_to_json(r)) == r


def test_cs_values():
    assert cs_rays(C, X[0], X[2]) == CsValue(1)
    assert cs_rays(C, X[0], X[0]) == CsValue(0)
    # b = t:3 against q values g:0 and t:5
    assert cs_rays(C, X[0], make_ray([None, 0, 2])) == CsValue(1)
    assert cs_rays(B, X[1], X[2]) == CsValue(2)


def test_interval_membership():
    assert interval_member(make_ray([None, 0, 2]), make_ray([None, 0, 3]), make_ray([None, 0, 1]))
    assert not interval_member(make_ray([0, None]), make_ray([None, 0]), make_ray([-1, 0]))
    assert interval_member(X[0], X[0], X[1]) and interval_member(X[1], X[0], X[1])


def test_hull_and_cells():
    Z = make_ray([0, 0, 0])
    assert hull_member(Z, X)
    assert hull_cell(Z, X) == (0, 1, 2)
    assert hull_cell(X[1], X) == (1,)
    assert hull_cell(X[0], X[1:]) is None
    assert principal_shifts(Z, X) == [0, 0, 0]


def test_g_isotropy():
    assert g_isotropy(B, X[0]) == "g_isotropic"
    assert g_isotropy(B, make_ray([None, 0, 0])) == "g_anisotropic"
    assert is_g_isotropic(C, X[0]) and not is_g_isotropic(C, X[2])
    # the ghost scalar survives on the vector level only
    assert eval_q(C, vector(["0", "t:0", "g:1"], DISCRETE)).is_ghost
    assert not is_g_isotropic(C, make_ray([None, 0, 1]))


def test_interval_skeleton_fixture_c():
    sk = interval_skeleton(C, X[1], X[2])
    assert sk[:2] == [X[1], X[2]]
    assert all(interval_member(Z, X[1], X[2]) for Z in sk)
    assert make_ray([None, 0, 0]) in sk


def test_recover_endpoints():
    pts = [X[1], X[2], make_ray([None, 0, 0])]
    assert recover_endpoints(pts) == [(X[1], X[2])]


@given(profiles, profiles, st.fractions(0, 1, max_denominator=8))
def test_interval_points_are_members(p, q, t):
    if len(p) != len(q):
        return
    A, Bq = make_ray(p), make_ray(q)
    Z = point_on_interval(A, Bq, t)
    assert interval_member(Z, A, Bq)


@given(st.integers(0, 10_000))
def test_sampled_hull_points_are_members(seed):
    S = [make_ray([0, -1, None]), make_ray([None, 0, -2]), make_ray([-3, None, 0])]
    for Z in sample_hull(S, random.Random(seed), 5, DISCRETE):
        assert hull_member(Z, S)


@given(profiles, profiles)
def test_cs_symmetric_and_self_e(p, q):
    if len(p) != len(q):
        return
    f = chain_form(len(p))
    A, Bq = make_ray(p), make_ray(q)
    assert cs_rays(f, A, Bq) == cs_rays(f, Bq, A)
    assert cs_rays(f, A, A) == CsValue(0)
    assert is_ql_pair(f, A, A)
