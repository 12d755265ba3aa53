"""Line-oriented text format for maps and spanning patches.

A map block::

    surfacemap 1
    vertices 3
    rot 0: 1 2
    rot 1: 2 0
    rot 2: 0 1
    sign 0 1 -          # optional, negative edges
    hole 0 1            # optional, face holding dart 0->1 on side +
    tags                # optional
    tag 0 black

A patch block follows the map it refers to::

    patch
    0 1
    ...
    holes 2
    0 1 2
    3 4 5

``#`` starts a comment.  Blocks of other kinds (``record ... end``) are
skipped by :func:`parse_stream`, so command output can be piped onward.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, SurfaceMapError
from .mapcore import SurfaceMap, edge_key

HEADER = "surfacemap 1"


@dataclass
class PatchBlock:
    kept_edges: list[tuple[int, int]]
    hole_walks: list[tuple[int, ...]]


@dataclass
class Stream:
    map: SurfaceMap | None
    patch: PatchBlock | None


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def _parse_map(lines, start_line):
    n = None
    rot = {}
    neg = []
    holes = []
    tags = {}
    for lineno, line in lines:
        head, *rest = line.split()
        if head == "vertices":
            if n is not None:
                raise ParseError("vertex count given twice", lineno)
            (n,) = _ints(rest, lineno) if len(rest) == 1 else (None,)
            if n is None or n < 0:
                raise ParseError("expected 'vertices N'", lineno)
        elif head == "rot":
            if n is None:
                raise ParseError("'rot' before 'vertices'", lineno)
            label, sep, tail = line[3:].partition(":")
            if not sep:
                raise ParseError("expected 'rot v: u1 u2 ...'", lineno)
            (v,) = _ints([label.strip()], lineno)
            if not 0 <= v < n:
                raise ParseError(f"vertex {v} out of range 0..{n - 1}", lineno)
            if v in rot:
                raise ParseError(f"rotation of vertex {v} given twice", lineno)
            nbrs = _ints(tail.split(), lineno)
            bad = [w for w in nbrs if not 0 <= w < n]
            if bad:
                raise ParseError(f"neighbour {bad[0]} out of range 0..{n - 1}", lineno)
            rot[v] = (nbrs, lineno)
        elif head == "sign":
            if len(rest) != 3 or rest[2] not in "+-":
                raise ParseError("expected 'sign u v -'", lineno)
            u, v = _ints(rest[:2], lineno)
            if rest[2] == "-":
                neg.append((u, v, lineno))
        elif head == "hole":
            if len(rest) != 2:
                raise ParseError("expected 'hole u v'", lineno)
            holes.append((*_ints(rest, lineno), lineno))
        elif head == "tags":
            if rest:
                raise ParseError("'tags' takes no arguments", lineno)
        elif head == "tag":
            if len(rest) != 2 or rest[1] not in ("black", "white"):
                raise ParseError("expected 'tag v black|white'", lineno)
            (v,) = _ints(rest[:1], lineno)
            tags[v] = rest[1]
        else:
            raise ParseError(f"unknown keyword {head!r}", lineno)
    if n is None:
        raise ParseError("missing 'vertices N'", start_line)
    rows = [rot.get(v, ([], start_line))[0] for v in range(n)]
    line_of = {v: ln for v, (_, ln) in rot.items()}
    try:
        probe = SurfaceMap(rows)
    except SurfaceMapError as exc:
        where = _blame(rows, line_of, start_line)
        raise ParseError(str(exc), where) from None
    for u, v, lineno in neg:
        if not probe.has_edge(u, v):
            raise ParseError(f"signed pair {u} {v} is not an edge", lineno)
    for u, v, lineno in holes:
        if (u, v) not in probe.dart_index:
            raise ParseError(f"hole anchor {u} {v} is not a dart", lineno)
    for v in tags:
        if not 0 <= v < n:
            raise ParseError(f"tagged vertex {v} out of range", start_line)
    return SurfaceMap(rows, [(u, v) for u, v, _ in neg], [(u, v) for u, v, _ in holes], tags)


def _blame(rows, line_of, default):
    """Line of the first rotation involved in a structural error."""
    sets = [set(r) for r in rows]
    for v, r in enumerate(rows):
        if len(set(r)) != len(r) or v in sets[v] or any(v not in sets[w] for w in r):
            return line_of.get(v, default)
    return default


def _parse_patch(lines, start_line):
    kept = []
    walks = []
    expect = None
    for lineno, line in lines:
        toks = line.split()
        if toks[0] == "holes":
            if expect is not None or len(toks) != 2:
                raise ParseError("expected a single 'holes b' line", lineno)
            (expect,) = _ints(toks[1:], lineno)
        elif expect is None:
            if len(toks) != 2:
                raise ParseError("expected an edge 'u v'", lineno)
            kept.append(tuple(_ints(toks, lineno)))
        else:
            walks.append(tuple(_ints(toks, lineno)))
    if expect is None:
        raise ParseError("patch block lacks 'holes b'", start_line)
    if len(walks) != expect:
        raise ParseError(f"patch announces {expect} holes but lists {len(walks)}", start_line)
    return PatchBlock(kept, walks)


def parse_stream(text: str) -> Stream:
    """Split ``text`` into blocks and parse the first map and first patch."""
    blocks = []
    current = None
    for lineno, line in _lines(text):
        word = line.split()[0]
        if line == HEADER or word in ("patch", "record") or line.startswith("surfacemap"):
            if line.startswith("surfacemap") and line != HEADER:
                raise ParseError(f"unsupported header {line!r}", lineno)
            current = [word, lineno, []]
            blocks.append(current)
            continue
        if current is None:
            raise ParseError(f"expected {HEADER!r}", lineno)
        if current[0] == "record":
            if line == "end":
                current = None
            continue
        current[2].append((lineno, line))
    m = patch = None
    for kind, lineno, body in blocks:
        if kind == "surfacemap" and m is None:
            m = _parse_map(body, lineno)
        elif kind == "patch" and patch is None:
            patch = _parse_patch(body, lineno)
    return Stream(m, patch)


def parse_map(text: str) -> SurfaceMap:
    s = parse_stream(text)
    if s.map is None:
        raise ParseError("no map found", 1)
    return s.map


def serialize_map(m: SurfaceMap) -> str:
    out = [HEADER, f"vertices {m.vertex_count}"]
    out += [f"rot {v}: {' '.join(map(str, r))}".rstrip() for v, r in enumerate(m.rotations)]
    out += [f"sign {u} {v} -" for u, v in sorted(m.negative_edges)]
    for f in sorted(m.holes):
        u, v = m.plus_anchor(f)
        out.append(f"hole {u} {v}")
    if m.tags:
        out.append("tags")
        out += [f"tag {v} {m.tags[v]}" for v in sorted(m.tags)]
    return "\n".join(out) + "\n"


def serialize_patch(kept_edges, hole_walks) -> str:
    out = ["patch"]
    out += [f"{u} {v}" for u, v in sorted(edge_key(*e) for e in kept_edges)]
    out.append(f"holes {len(hole_walks)}")
    out += [" ".join(map(str, w)) for w in hole_walks]
    return "\n".join(out) + "\n"


__all__ = ["HEADER", "PatchBlock", "Stream", "parse_map", "parse_stream",
           "serialize_map", "serialize_patch"]
