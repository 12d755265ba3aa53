import random

import pytest

from oracles import complex_is_sphere_with_holes
from surftri.errors import NotATorus, NotFound, NoExpansionMove
from surftri.genlab import (
    double_grid,
    face_subdivision,
    grid_row,
    k6_projective,
    k7_torus,
    random_refinement,
    torus_grid,
)
from surftri.mapcore import relabel
from surftri.spanner import (
    WidthTable,
    double_factorial,
    expand_cylinder,
    find_disjoint_homotopic_pair,
    find_spanning_cylinder_torus,
    find_spanning_sphere_general,
    gamma,
    phi,
    shrink_cylinder,
    star_boundaries,
    verify_spanning_patch,
)
from surftri.topology import are_homotopic_disjoint, classify_cycle, cylinders_between, make_cycle


def test_phi_values():
    assert (phi(1, 0), phi(1, 2), phi(2, 0), phi(3, 0)) == (5, 9, 29, 229)


def test_gamma_values():
    assert [gamma(h) for h in (1, 2, 3)] == [5, 29, 229]


def test_gamma_equals_phi():
    for h in range(1, 13):
        assert gamma(h) == phi(h, 0)


def test_phi_monotone():
    for h in range(1, 13):
        for q in range(12):
            assert phi(h, q + 1) > phi(h, q)
            assert phi(h + 1, q) > phi(h, q)


def test_double_factorial_conventions():
    assert double_factorial(-1) == 1 and double_factorial(0) == 1 and double_factorial(7) == 105


def test_width_table():
    t = WidthTable(4)
    assert t.gamma[4] == t.phi[(4, 0)] == 2725


def test_pair_on_grid_is_adjacent_row():
    m = torus_grid(3, 3)
    p = find_disjoint_homotopic_pair(m)
    rows = [frozenset(grid_row(3, 3, j)) for j in range(3)]
    assert p.first.vertex_set in rows and p.second.vertex_set in rows
    assert are_homotopic_disjoint(m, p.first, p.second)


def test_pair_forbidden_rows():
    m = torus_grid(3, 3)
    with pytest.raises(NotFound) as info:
        find_disjoint_homotopic_pair(m, grid_row(3, 3, 0) + grid_row(3, 3, 1))
    assert info.value.exhaustive


def test_pair_on_k7_exists():
    m = k7_torus()
    p = find_disjoint_homotopic_pair(m)
    assert not p.first.vertex_set & p.second.vertex_set
    for c in (p.first, p.second):
        assert classify_cycle(m, c) == "nonseparating"
    assert are_homotopic_disjoint(m, p.first, p.second)


def test_star_boundary_of_row():
    m = torus_grid(5, 5)
    sides = star_boundaries(m, make_cycle(m, grid_row(5, 5, 2)))
    assert {d.vertex_set for d, _ in sides} == {frozenset(grid_row(5, 5, 1)), frozenset(grid_row(5, 5, 3))}


def test_expand_from_strip_covers_grid():
    m = torus_grid(3, 3)
    c, d = make_cycle(m, grid_row(3, 3, 0)), make_cycle(m, grid_row(3, 3, 1))
    res = expand_cylinder(m, c, d)
    assert res.region.closure_vertices == frozenset(range(9))
    assert res.steps >= 1
    assert are_homotopic_disjoint(m, res.first, res.second)


def test_expand_fixed_point():
    m = torus_grid(4, 4)
    c, d = make_cycle(m, grid_row(4, 4, 0)), make_cycle(m, grid_row(4, 4, 1))
    big = max(cylinders_between(m, c, d), key=lambda r: len(r.faces))
    res = expand_cylinder(m, c, d, big)
    assert res.steps == 0 and res.region == big


def test_expand_rejects_non_torus():
    m = k6_projective()
    c = make_cycle(m, [0, 1, 2])
    with pytest.raises(NotATorus):
        expand_cylinder(m, c, c)


def test_expand_stall_is_reported():
    # the thin strip of T(5,5) grows into a dead end; surfaced, not hidden
    m = torus_grid(5, 5)
    c, d = make_cycle(m, grid_row(5, 5, 0)), make_cycle(m, grid_row(5, 5, 1))
    with pytest.raises(NoExpansionMove):
        expand_cylinder(m, c, d)


def test_shrink_to_vertex_free():
    m = torus_grid(5, 5)
    c, d = make_cycle(m, grid_row(5, 5, 0)), make_cycle(m, grid_row(5, 5, 3))
    for region in cylinders_between(m, c, d):
        before = len(region.faces)
        res = shrink_cylinder(m, c, d, region)
        assert not res.region.contains_vertex_interior
        assert len(res.region.faces) == before - res.steps
        assert res.steps <= m.face_count
        assert are_homotopic_disjoint(m, res.first, res.second)


def test_shrink_already_vertex_free():
    m = torus_grid(5, 5)
    c, d = make_cycle(m, grid_row(5, 5, 0)), make_cycle(m, grid_row(5, 5, 1))
    res = shrink_cylinder(m, c, d)
    assert res.steps == 0


def _check_patch(m, patch, b):
    assert patch.hole_count == b and patch.genus_of_patch == 0
    V, E, F, chi, bb = patch.certificate
    assert V == m.vertex_count and chi == V - E + F == 2 - b and bb == b
    tris = [m.faces[f].vertices for f in patch.triangle_faces]
    ok, chi2, b2 = complex_is_sphere_with_holes(tris)
    assert ok and chi2 == chi and b2 == b
    assert {v for t in tris for v in t} == set(range(m.vertex_count))


@pytest.mark.parametrize("m", [torus_grid(3, 3), torus_grid(5, 5), torus_grid(4, 9), k7_torus(),
                               random_refinement(torus_grid(4, 4), 20, 7)],
                         ids=["t33", "t55", "t49", "k7", "refined"])
def test_torus_finder(m):
    _check_patch(m, find_spanning_cylinder_torus(m), 2)


def test_torus_finder_rejects_k6():
    with pytest.raises(NotATorus):
        find_spanning_cylinder_torus(k6_projective())


def test_general_on_torus_matches_torus_finder():
    m = torus_grid(4, 4)
    assert find_spanning_sphere_general(m) == find_spanning_cylinder_torus(m)


def test_general_on_double_grid():
    m = double_grid(6, 6).map
    _check_patch(m, find_spanning_sphere_general(m), 4)


def test_general_on_subdivided_k7_outcome():
    m = face_subdivision(k7_torus())
    _check_patch(m, find_spanning_sphere_general(m), 2)


def test_verifier_rejects_whole_surface():
    for m in (k7_torus(), torus_grid(3, 3)):
        res = verify_spanning_patch(m, m.edges)
        assert not res.accepted and res.reasons


def test_verifier_rejects_missing_vertex():
    m = torus_grid(4, 4)
    patch = find_spanning_cylinder_torus(m)
    drop = next(iter(patch.kept_edges))
    assert not verify_spanning_patch(m, patch.kept_edges - {drop}).accepted


def test_relabel_invariance_of_counts():
    m = torus_grid(4, 6)
    perm = list(range(m.vertex_count))
    random.Random(3).shuffle(perm)
    a = find_spanning_cylinder_torus(m)
    b = find_spanning_cylinder_torus(relabel(m, perm))
    assert b.hole_count == a.hole_count == 2
    assert verify_spanning_patch(relabel(m, perm), b.kept_edges).accepted


def test_pair_workers_give_same_answer():
    m = random_refinement(torus_grid(4, 4), 12, 5)
    one = find_disjoint_homotopic_pair(m)
    two = find_disjoint_homotopic_pair(m, workers=2)
    assert (one.first, one.second) == (two.first, two.second)
