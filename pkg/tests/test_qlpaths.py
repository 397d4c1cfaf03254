import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from qlstar import qlpaths as P
from qlstar.checks import path_universes, sample_paths
from qlstar.fixtures import band_universe, basis_rays, fixture_universe, graph_form, twin_universe
from qlstar.qlcore import PreconditionError, build_universe

D_PATH = (0, 1, 2, 3, 4)


@pytest.fixture(scope="module")
def D():
    return fixture_universe("D")


@pytest.fixture(scope="module")
def Ut():
    # Fixture D basis plus Y = ray(e2 + e3) at index 5
    return twin_universe()


@pytest.fixture(scope="module")
def bands():
    return path_universes()


def test_graphs(D):
    g = P.build_ql_graph(D)
    assert g.edges == [(0, 1), (1, 2), (2, 3), (3, 4)]
    assert "v0 -- v1;" in g.to_dot()
    assert json.loads(json.dumps(g.to_json())) == g.to_json()
    # the end rays of the chain have strictly smaller stars
    assert P.decorate(D).arrows == [(0, 1), (4, 3)]
    assert P.decorate(fixture_universe("A")).arrows == [(0, 3), (1, 3), (2, 3)]


def test_paths_and_directness(D):
    assert P.is_path(D, D_PATH) and P.is_direct(D, D_PATH)
    assert not P.is_direct(D, (0, 0))
    A = fixture_universe("A")
    assert P.is_direct(A, (0, 3, 1))
    assert P.distances(D, 0) == {0: 0, 1: 1, 2: 2, 3: 3, 4: 4}
    assert P.minimal_path(D, 0, 4).indices == D_PATH


def test_basic_reduction_fixture_a():
    A = fixture_universe("A")
    assert P.basic_reduction(A, [0, 3, 1, 3, 2], 1).indices == (0, 3, 2)
    assert P.basic_reduction(A, [0, 3, 1], 0) is None
    final, trace = P.reduce_to_direct(A, [0, 3, 1, 3, 2])
    assert final.indices == (0, 3, 2) and len(trace) == 1


def test_two_direct_reducts():
    # chain on seven rays plus the chords X0-X2 and X1-X5
    edges = [(i, i + 1) for i in range(6)] + [(0, 2), (1, 5)]
    U = build_universe(graph_form(7, edges), basis_rays(7))
    p = tuple(range(7))
    a = P.basic_reduction(U, p, 0)
    b = P.basic_reduction(U, p, 1)
    assert a.indices == (0, 2, 3, 4, 5, 6) and P.is_direct(U, a)
    assert b.indices == (0, 1, 5, 6) and P.is_direct(U, b)


def test_twin_universe_values(Ut):
    p = D_PATH
    assert P.upset(Ut, [5]) == {1, 2, 5}
    ann = P.twins_and_singles(Ut, p)
    assert ann.twin == [True, True, False, True] and not any(ann.single)
    S = P.anchor_set(Ut, p)
    assert S.anchors == (0, 5, 4) and S.m == 2
    assert S.legal == (0, 0, 1, 2, 2) and S.illegal[1] == (1,)
    assert P.anchor_set(Ut, p, "special").anchors == (0, 5, 4)
    fp = P.flocks(Ut, p, S)
    assert fp.flocks == [(0, 2)] and fp.isolated == [3] and fp.singles == []
    assert P.tracks(Ut, S) == [P.Track(0, 1)] and P.is_flocky(Ut, p)
    assert P.is_optimal(Ut, p) and not P.scholium_window(Ut, p)
    ee = P.entrance_exit(Ut, p)
    assert (ee.entrance, ee.exit) == ("wide", "wide")
    assert P.is_direct_sql_sequence(Ut, S.anchors)


def test_fixture_d_anchor_set(D):
    S = P.anchor_set(D, D_PATH)
    assert S.anchors == (0, 2, 4) and S.twin == (True, False, False, True)
    assert S.bound_holds()


def test_optimal_but_not_cofinal(D):
    # optimal in the window sense, yet direct enlargements are not cofinal
    assert P.is_optimal(D, D_PATH)
    assert not P.direct_enlargements_cofinal(D, D_PATH)
    assert not P.substitutions_direct(D, D_PATH)
    assert P.substitutions_direct(D, D_PATH) == P.direct_enlargement_condition(D, D_PATH)


def test_common_upper_ray_two_steps_apart(Ut):
    p = (2, 1, 0)
    assert P.is_minimal(Ut, p)
    # (X3 down) up and (X1 down) up share X2
    assert P._up_of_down(Ut, 2) & P._up_of_down(Ut, 0) == 1 << 1


def test_flocky_depends_on_anchor_set(bands):
    U = bands["band7"]
    p = (0, 1, 3)
    greedy, special = P.anchor_set(U, p, "greedy"), P.anchor_set(U, p, "special")
    assert greedy.anchors == (7, 8) and special.anchors == (7, 3)
    assert P.is_anchor_set(U, p, greedy.anchors) and P.is_anchor_set(U, p, special.anchors)
    assert not P.is_flocky(U, p, greedy) and P.is_flocky(U, p, special)


def test_domination_can_create_twins(bands):
    U = bands["band3"]
    X, Y = (9, 3, 5), (1, 3, 4)
    assert P.dominates(U, Y, X) and P.is_minimal(U, X) and P.is_minimal(U, Y)
    rep = P.check_domination_theorems(U, X, Y)
    assert rep.checks["minimality transfers"] and rep.checks["inner dominator minimal"]
    assert not rep.checks["twin pairs correspond"]
    assert P._twins(U, X) == [True, False] and P._twins(U, Y) == [True, True]


def test_domination_report_on_self_and_non_dominating(D):
    assert P.check_domination_theorems(D, D_PATH, D_PATH).ok
    rep = P.check_domination_theorems(D, D_PATH, (0, 1, 2, 3, 2))
    assert not rep.checks["dominates"] and rep.notes


def test_no_tracks_modification_is_identity(D):
    q, steps, skipped = P.total_flock_modification(D, D_PATH)
    assert q.indices == D_PATH and steps == [] and skipped == []


def test_anchor_diagram_round_trip(Ut):
    dg = P.anchor_diagram(Ut, D_PATH)
    assert P.AnchorDiagram.from_json(json.loads(json.dumps(dg.to_json()))) == dg
    assert P.diagram_to_dot(dg).startswith("digraph anchors {")


def test_preconditions(D):
    with pytest.raises(PreconditionError):
        P.reduce_to_direct(D, (0, 2))
    with pytest.raises(PreconditionError):
        P.elementary_reduction(D, D_PATH, 1, 4)
    with pytest.raises(PreconditionError):
        P.entrance_modification(D, (0, 1))


def walks(U, rng, length):
    w = [rng.randrange(len(U))]
    for _ in range(length):
        w.append(rng.choice([j for j in range(len(U)) if U.adjacent(w[-1], j)]))
    return w


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 49), st.integers(0, 10**6))
def test_reductions_reach_direct_paths(k, seed):
    U = band_universe(seed=k)
    rng = random.Random(seed)
    w = walks(U, rng, rng.randint(2, 9))
    if w[0] == w[-1]:
        return
    final, trace = P.reduce_to_direct(U, w)
    assert P.is_direct(U, final) and len(trace) <= len(w) - 2
    efinal, _ = P.reduce_elementary(U, w)
    assert P.is_direct(U, efinal)
    assert (efinal.indices[0], efinal.indices[-1]) == (w[0], w[-1])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 49))
def test_minimal_paths_are_direct_and_anchor_sets_agree(k):
    U = band_universe(seed=k)
    minimal, _ = sample_paths(U, random.Random(k), 0, 15)
    for p in minimal:
        assert P.is_direct(U, p)
        if len(p) >= 4:
            assert P.is_optimal(U, p)
        S1, S2 = P.anchor_set(U, p), P.anchor_set(U, p, "special")
        assert S1.m == S2.m and S1.legal == S2.legal and S1.illegal == S2.illegal
        assert P.is_direct_sql_sequence(U, S1.anchors)
