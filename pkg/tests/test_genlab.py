import random

import pytest
from hypothesis import given, settings, strategies as st

from surftri.errors import AnchorNotTriangle, GridTooSmall, NonOrientableInput, NotAFaceSubdivision
from surftri.genlab import (
    FIXTURES,
    check_face_subdivision,
    connected_sum,
    double_grid,
    face_subdivision,
    fill_holes,
    grid_row,
    k6_projective,
    k7_torus,
    no_spanning_certificate,
    random_refinement,
    sphere_triangle,
    torus_grid,
)
from surftri.mapcore import SurfaceMap, edge_key, euler_genus, validate_triangulation
from surftri.topology import cut_along, facewidth, make_cycle


def counts(m):
    return m.vertex_count, m.edge_count, m.face_count


@pytest.mark.parametrize("m, n", [(3, 3), (3, 7), (5, 4), (10, 10)])
def test_torus_grid(m, n):
    t = torus_grid(m, n)
    assert counts(t) == (m * n, 3 * m * n, 2 * m * n)
    assert euler_genus(t) == (2, True)
    assert validate_triangulation(t).ok


def test_torus_grid_neighbourhood():
    t = torus_grid(4, 5)
    v = 1 * 4 + 2  # (i, j) = (2, 1)
    expect = {(3, 1), (1, 1), (2, 2), (2, 0), (3, 2), (1, 0)}
    assert set(t.rotations[v]) == {j * 4 + i for i, j in expect}


def test_torus_grid_too_small():
    with pytest.raises(GridTooSmall):
        torus_grid(2, 5)


def test_fixtures():
    assert euler_genus(FIXTURES["k7"]()) == (2, True)
    assert euler_genus(FIXTURES["k6"]()) == (1, False)
    assert euler_genus(FIXTURES["sphere"]()) == (0, True)


def test_double_grid_counts():
    g = double_grid(6, 6).map
    assert counts(g) == (69, 213, 142)
    assert euler_genus(g) == (4, True)
    assert g.vertex_count - g.edge_count + g.face_count == -2


def test_sphere_sum_torus():
    g = connected_sum(sphere_triangle(), torus_grid(4, 4), 0, 0)
    assert euler_genus(g.map) == (2, True)


def test_connected_sum_errors():
    quad = SurfaceMap([[1, 3], [2, 0], [3, 1], [0, 2]])
    with pytest.raises(AnchorNotTriangle):
        connected_sum(quad, torus_grid(3, 3), 0, 0)
    with pytest.raises(NonOrientableInput):
        connected_sum(k6_projective(), torus_grid(3, 3), 0, 0)


@pytest.mark.parametrize("seed", range(10))
def test_connected_sum_genus_additive(seed):
    rng = random.Random(seed)
    pool = [sphere_triangle, k7_torus, lambda: torus_grid(3, 4), lambda: torus_grid(4, 4)]
    a = random_refinement(rng.choice(pool)(), rng.randrange(4), seed)
    b = random_refinement(rng.choice(pool)(), rng.randrange(4), seed + 1)
    g = connected_sum(a, b, rng.randrange(a.face_count), rng.randrange(b.face_count))
    assert euler_genus(g.map)[0] == euler_genus(a)[0] + euler_genus(b)[0]
    assert validate_triangulation(g.map).ok


@pytest.mark.parametrize("base, expect", [
    (k7_torus(), ((21, 63, 42), (2, True), 7, 14)),
    (k6_projective(), ((16, 45, 30), (1, False), 6, 10)),
    (sphere_triangle(), ((5, 9, 6), (0, True), 3, 2)),
], ids=["k7", "k6", "sphere"])
def test_face_subdivision(base, expect):
    sub = face_subdivision(base)
    shape, genus, B, W = expect
    assert counts(sub) == shape and euler_genus(sub) == genus
    black, white = check_face_subdivision(sub)
    assert (len(black), len(white)) == (B, W)
    g = genus[0]
    assert W == 2 * B + 2 * g - 4


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 25), st.integers(0, 10 ** 6))
def test_white_identity_on_refined_fixtures(steps, seed):
    base = random_refinement(random.Random(seed).choice([k7_torus(), k6_projective(), torus_grid(3, 3)]),
                             steps, seed)
    sub = face_subdivision(base)
    black, white = check_face_subdivision(sub)
    g = euler_genus(sub)[0]
    assert len(white) == 2 * len(black) + 2 * g - 4
    whites = set(white)
    assert all(sub.degree(w) == 3 for w in white)
    assert all(not (set(sub.rotations[w]) & whites) for w in white)
    black_edges = {e for e in sub.edges if not set(e) & whites}
    assert black_edges == set(base.edges)


def test_subdivision_check_rejects_untagged():
    with pytest.raises(NotAFaceSubdivision):
        check_face_subdivision(k7_torus())


def test_subdivision_check_rejects_bad_tags():
    sub = face_subdivision(k7_torus())
    tags = dict(sub.tags)
    tags[0] = "white"
    bad = SurfaceMap(sub.rotations, sub.negative_edges, (), tags)
    with pytest.raises(NotAFaceSubdivision):
        check_face_subdivision(bad)


@pytest.mark.parametrize("base, gprime, verdict", [
    (k7_torus(), 0, "impossible"),
    (k7_torus(), 1, "impossible"),
    (k7_torus(), 2, "inconclusive"),
    (k6_projective(), 0, "impossible"),
    (k6_projective(), 1, "inconclusive"),
], ids=["k7-0", "k7-1", "k7-2", "k6-0", "k6-1"])
def test_certificate(base, gprime, verdict):
    cert = no_spanning_certificate(face_subdivision(base), gprime)
    assert cert.verdict == verdict
    assert cert.identity_holds
    assert cert.W_bound == 2 * cert.B + 2 * gprime - 4


def test_certificate_sphere_is_inconclusive():
    assert no_spanning_certificate(face_subdivision(sphere_triangle()), 0).verdict == "inconclusive"


def test_certificate_patch_fields():
    from surftri.spanner import find_spanning_cylinder_torus
    sub = face_subdivision(k7_torus())
    patch = find_spanning_cylinder_torus(sub)
    cert = no_spanning_certificate(sub, 2, patch)
    assert cert.ell == sum(len(w) for w in patch.hole_walks)
    assert cert.W2 <= cert.W2_bound


def test_refinement_basics():
    t = torus_grid(4, 4)
    assert random_refinement(t, 0, 3) == t
    r = random_refinement(t, 20, 7)
    assert r.vertex_count == 36 and euler_genus(r) == (2, True) and validate_triangulation(r).ok
    assert random_refinement(t, 20, 7) == r


def test_every_face_once_matches_subdivision_counts():
    m = k7_torus()
    from surftri.genlab import insert_face_vertex
    r = m
    for _ in range(m.face_count):
        r = insert_face_vertex(r, 0)  # face 0 is always an untouched original face
    sub = face_subdivision(m)
    assert counts(r) == counts(sub) and euler_genus(r) == euler_genus(sub)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 30), st.integers(0, 10 ** 6))
def test_refinement_preserves_surface(steps, seed):
    base = random.Random(seed).choice([k7_torus(), k6_projective(), sphere_triangle()])
    r = random_refinement(base, steps, seed)
    assert euler_genus(r) == euler_genus(base) and validate_triangulation(r).ok


def test_fill_holes():
    t = torus_grid(3, 3)
    assert fill_holes(t) is t
    g = torus_grid(5, 5)
    (piece,) = cut_along(g, make_cycle(g, grid_row(5, 5, 0)))
    closed = fill_holes(piece.map)
    assert not closed.holes
    assert closed.vertex_count - closed.edge_count + closed.face_count == 2
    assert sorted(w.length for w in closed.faces)[-2:] == [5, 5]


def test_subdivision_facewidth_is_computed():
    assert facewidth(face_subdivision(torus_grid(4, 4))).width == 4
