import itertools

import pytest

from dimermm.dimer_core import DimerModel, Edge, dual_qp, trace_faces
from dimermm.matchings import (
    MatchingError,
    convex_hull,
    enumerate_matchings,
    extremal_matchings,
    extremals_in_order,
    homology_class,
    is_nondegenerate,
    is_perfect_matching,
    path_value,
    pm_polygon,
)

from conftest import CORPUS

# frozen from the brute-force oracle below
COUNTS = {
    "3a": 6, "4a-1": 8, "4a-2": 9, "4b-1": 8, "5a-1": 10, "5a-2": 11, "5b-1": 11,
    "6a-1": 12, "6a-2": 13, "6a-2p": 13, "6a-2pp": 13, "6a-3": 14, "6a-3p": 14, "6a-4": 14,
    "6a-5": 17, "6b-1": 13, "6b-2": 14, "6b-3": 15, "6c-1": 14, "6c-2": 15,
    "7a-1": 18, "7a-2": 18, "7a-2p": 18, "7a-3": 21, "7b-1": 21,
    "8a-1": 24, "8a-2": 26, "8a-3": 33, "8a-4": 24, "8a-4p": 24, "8b-1": 26, "8b-2": 28,
    "conifold": 4,
}


def brute_matchings(d):
    """All edge subsets of size V/2 covering every vertex once."""
    V = [v for v, _ in d.vertices]
    ends = {e.id: (e.white, e.black) for e in d.edges}
    out = []
    for S in itertools.combinations(sorted(ends), len(V) // 2):
        covered = [x for e in S for x in ends[e]]
        if len(set(covered)) == len(V):
            out.append(tuple(S))
    return sorted(out)


def brute_hull(points):
    """Points of the set that are not in the convex hull of the others (exact test via triangles)."""
    pts = sorted(set(points))

    def inside(p, a, b, c):
        def cr(o, u, v):
            return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])
        if cr(a, b, c) == 0:
            return False
        s = [cr(a, b, p), cr(b, c, p), cr(c, a, p)]
        return all(x >= 0 for x in s) or all(x <= 0 for x in s)

    def on_segment(p, a, b):
        cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        return cr == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])

    out = []
    for p in pts:
        rest = [q for q in pts if q != p]
        covered = any(inside(p, *t) for t in itertools.combinations(rest, 3)) or \
            any(on_segment(p, a, b) for a, b in itertools.combinations(rest, 2))
        if not covered:
            out.append(p)
    return sorted(out)


@pytest.mark.parametrize("name", sorted(COUNTS))
def test_counts_frozen_and_match_oracle(name):
    d = CORPUS.dimer(name)
    ms = enumerate_matchings(d)
    assert len(ms) == COUNTS[name]
    if len(d.edges) <= 16:
        assert ms == brute_matchings(d)


def test_4a_has_eight_matchings_with_drawn_ones():
    ms = enumerate_matchings(CORPUS.dimer("4a-1"))
    assert len(ms) == 8
    for P in [("e03", "e06"), ("e04", "e08"), ("e03", "e07"), ("e01", "e05"), ("e02", "e06")]:
        assert P in ms


def test_every_matching_is_perfect():
    for n in ("4a-1", "6b-1", "8a-3"):
        d = CORPUS.dimer(n)
        for P in enumerate_matchings(d):
            assert is_perfect_matching(d, P)
    d = CORPUS.dimer("4a-1")
    assert not is_perfect_matching(d, ("e03",))
    assert not is_perfect_matching(d, ("e03", "e04"))


def test_nondegenerate():
    assert is_nondegenerate(CORPUS.dimer("4a-1"))
    for n in CORPUS.names():
        assert is_nondegenerate(CORPUS.dimer(n)), n


def test_extra_parallel_edge_decided_by_oracle():
    d = CORPUS.dimer("4a-1")
    e = d.edges[0]
    extra = Edge("x", e.white, e.black, e.dx, e.dy)
    rots = {v: list(r) for v, r in d.rotations}
    rots[e.white].insert(rots[e.white].index(e.id) + 1, "x")
    rots[e.black].insert(rots[e.black].index(e.id), "x")
    d2 = DimerModel.build(d.vertices, list(d.edges) + [extra], rots)
    brute = brute_matchings(d2)
    assert enumerate_matchings(d2) == brute
    used = {x for P in brute for x in P}
    assert is_nondegenerate(d2) == (used == {x.id for x in d2.edges})


def test_homology_4a_vertical():
    d = CORPUS.dimer("4a-1")
    assert homology_class(d, ("e03", "e07"), ("e03", "e06")) == (0, 1)
    assert homology_class(d, ("e03", "e06"), ("e03", "e06")) == (0, 0)


def test_homology_cocycle_exhaustive():
    for n in ("4a-1", "5b-1", "6c-1", "conifold"):
        d = CORPUS.dimer(n)
        ms = enumerate_matchings(d)
        for P, Q, S in itertools.product(ms, repeat=3):
            a = homology_class(d, P, Q)
            b = homology_class(d, Q, S)
            c = homology_class(d, P, S)
            assert (a[0] + b[0], a[1] + b[1]) == c


def test_4a_polygon():
    P = pm_polygon(CORPUS.dimer("4a-1"), ("e03", "e06"))
    assert sorted(P.hull) == sorted([(1, 0), (0, 1), (-1, 0), (0, -1)])
    assert all(P.mult[v] == 1 for v in P.hull)
    assert P.mult[(0, 0)] == 4
    assert sum(P.mult.values()) == 8


def test_conifold_square():
    P = pm_polygon(CORPUS.dimer("conifold"))
    assert len(P.hull) == 4 and all(P.mult[v] == 1 for v in P.hull)
    xs = sorted(P.hull)
    assert (xs[-1][0] - xs[0][0], max(y for _, y in xs) - min(y for _, y in xs)) == (1, 1)


def test_polygon_invariants_and_hull_oracle():
    for n in CORPUS.names():
        d = CORPUS.dimer(n)
        P = pm_polygon(d)
        assert sum(P.mult.values()) == COUNTS[n]
        assert sorted(P.hull) == brute_hull(P.mult), n


def test_convex_hull_drops_collinear():
    assert sorted(convex_hull([(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)])) == [(0, 0), (0, 1), (1, 1), (2, 0)]


def test_extremals_4a():
    d = CORPUS.dimer("4a-1")
    ex = extremal_matchings(d, ("e03", "e06"), [(1, 0), (0, 1), (-1, 0), (0, -1)])
    assert list(ex.values()) == [("e04", "e08"), ("e03", "e07"), ("e01", "e05"), ("e02", "e06")]
    with pytest.raises(MatchingError):
        extremal_matchings(d, ("e03", "e06"), [(0, 0)])


def test_extremals_3a():
    d = CORPUS.dimer("3a")
    P = pm_polygon(d)
    assert len(extremal_matchings(d, P.base, P.hull)) == 3
    assert len(extremals_in_order(d, [(1, 0), (0, 1), (-1, -1)])) == 3


def test_small_cycle_value_is_one():
    for n in CORPUS.names():
        d = CORPUS.dimer(n)
        q = dual_qp(d)
        ms = enumerate_matchings(d)
        for cyc, _ in q.potential:
            for P in ms:
                assert path_value(P, cyc, q) == 1


def test_path_a2_values():
    d = CORPUS.dimer("4a-1")
    ex = extremals_in_order(d, [(1, 0), (0, 1), (-1, 0), (0, -1)])
    assert [path_value(P, ["e03"]) for P in ex] == [0, 1, 0, 0]


def test_path_value_reverse_and_composability():
    d = CORPUS.dimer("4a-1")
    q = dual_qp(d)
    assert path_value(("e03", "e07"), ["e03*"], q) == -1
    with pytest.raises(MatchingError):
        path_value(("e03", "e07"), ["e03", "e03"], q)
    with pytest.raises(MatchingError):
        path_value(("e03", "e07"), ["nope"], q)


def test_face_count_matches_small_cycles():
    for n in CORPUS.names():
        d = CORPUS.dimer(n)
        assert len(dual_qp(d).potential) == len(d.vertices)
        assert len(trace_faces(d)) == len(d.edges) - len(d.vertices)
