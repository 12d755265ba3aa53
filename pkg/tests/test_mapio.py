import pytest
from hypothesis import given, settings, strategies as st

from surftri.errors import ParseError
from surftri.genlab import face_subdivision, k6_projective, k7_torus, random_refinement, torus_grid
from surftri.mapio import parse_map, parse_stream, serialize_map, serialize_patch
from surftri.topology import cut_along, make_cycle

GOOD = """# a sphere
surfacemap 1
vertices 3
rot 0: 1 2
rot 1: 2 0   # trailing comment
rot 2: 0 1
hole 0 1
"""


def test_parse_basic():
    m = parse_map(GOOD)
    assert m.vertex_count == 3 and len(m.holes) == 1


@pytest.mark.parametrize("m", [k7_torus(), k6_projective(), face_subdivision(k6_projective())],
                         ids=["k7", "k6", "k6-sub"])
def test_round_trip(m):
    text = serialize_map(m)
    again = parse_map(text)
    assert again == m and again.holes == m.holes and again.tags == m.tags
    assert serialize_map(again) == text


def test_round_trip_with_holes():
    t = torus_grid(3, 3)
    piece = cut_along(t, make_cycle(t, [0, 1, 2]))[0].map
    again = parse_map(serialize_map(piece))
    assert again.holes == piece.holes


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 12), st.integers(0, 1000))
def test_round_trip_refinements(steps, seed):
    m = random_refinement(torus_grid(3, 3), steps, seed)
    assert parse_map(serialize_map(m)) == m


@pytest.mark.parametrize("text, line", [
    ("vertices 3\n", 1),
    ("surfacemap 1\nvertices 2\nrot 0: x\n", 3),
    ("surfacemap 1\nvertices 3\nrot 0: 1 2\nrot 1: 2 0\nrot 2: 0\n", 4),
    ("surfacemap 1\nvertices 3\nrot 0: 1 2\nrot 1: 2 0\nrot 2: 0 1\nhole 0 0\n", 6),
    ("surfacemap 1\nvertices 3\nrot 0: 1 7\n", 3),
    ("surfacemap 1\nvertices 3\nfrobnicate\n", 3),
    ("surfacemap 2\n", 1),
    ("surfacemap 1\nvertices 3\nrot 0: 1 2\nrot 1: 2 0\nrot 2: 0 1\nsign 0 1 ?\n", 6),
])
def test_parse_errors_cite_lines(text, line):
    with pytest.raises(ParseError) as info:
        parse_map(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_stream_with_patch_and_record():
    m = torus_grid(3, 3)
    text = serialize_map(m) + serialize_patch([(1, 0), (0, 2)], [(0, 1, 2)]) + \
        "record x\ndigest none\nverdict accept\nend\n"
    s = parse_stream(text)
    assert s.map == m
    assert s.patch.kept_edges == [(0, 1), (0, 2)]
    assert s.patch.hole_walks == [(0, 1, 2)]


def test_patch_hole_count_mismatch():
    text = serialize_map(torus_grid(3, 3)) + "patch\n0 1\nholes 2\n0 1 2\n"
    with pytest.raises(ParseError):
        parse_stream(text)
