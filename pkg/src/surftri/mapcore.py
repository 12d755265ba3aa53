"""Graphs embedded on closed surfaces, encoded as signed rotation systems.

A map is given by a cyclic order of neighbours around every vertex plus a
sign per undirected edge (-1 marks an orientation-reversing edge).  Darts
are numbered in input order: all darts leaving vertex 0 in rotation order,
then those leaving vertex 1, and so on.

Faces are traced over *states* ``2 * dart + side`` where ``side`` is 0 for
``+`` and 1 for ``-``.  From state ``(u->v, s)`` the side is flipped if the
edge ``uv`` is negative, then the walk continues to the neighbour following
``u`` in the rotation at ``v`` (side ``+``) or preceding it (side ``-``).
The two orbits that traverse the same face in opposite directions are
identified, and faces are numbered by their least state.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    BadHoleAnchor,
    DisconnectedMap,
    DuplicateNeighbor,
    InvalidVertex,
    LoopEdge,
    NonMutualAdjacency,
    SurfaceMapError,
)

PLUS = 0
MINUS = 1


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class FacialWalk:
    face_id: int
    states: tuple[int, ...]
    darts: tuple[int, ...]
    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.darts)

    @property
    def is_simple(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)

    @property
    def is_triangle(self) -> bool:
        return self.length == 3 and self.is_simple


class SurfaceMap:
    """An immutable signed rotation system with optional hole faces.

    ``rotations[v]`` lists the neighbours of ``v`` in cyclic order.
    ``negative_edges`` holds the undirected edges carrying sign -1.
    ``holes`` are anchors ``(u, v)`` or ``(u, v, side)``; each names the face
    containing that state (side defaults to ``+``).
    ``tags`` optionally labels vertices (used for black/white colourings).
    """

    def __init__(self, rotations: Sequence[Sequence[int]], negative_edges: Iterable = (),
                 holes: Iterable = (), tags: dict | None = None):
        n = len(rotations)
        rot = tuple(tuple(int(w) for w in r) for r in rotations)
        for v, r in enumerate(rot):
            if len(set(r)) != len(r):
                raise DuplicateNeighbor(f"vertex {v} lists a neighbour twice")
            for w in r:
                if w == v:
                    raise LoopEdge(f"loop at vertex {v}")
                if not 0 <= w < n:
                    raise InvalidVertex(f"vertex {v} has neighbour {w} outside 0..{n - 1}")
        nbr_sets = [set(r) for r in rot]
        for v, r in enumerate(rot):
            for w in r:
                if v not in nbr_sets[w]:
                    raise NonMutualAdjacency(f"{v} lists {w} but {w} does not list {v}")

        self.rotations = rot
        self.vertex_count = n
        darts = []
        rot_darts = []
        for v, r in enumerate(rot):
            rot_darts.append(tuple(range(len(darts), len(darts) + len(r))))
            darts.extend((v, w) for w in r)
        self.darts = tuple(darts)
        self.rot_darts = tuple(rot_darts)
        self.dart_index = {d: i for i, d in enumerate(darts)}
        self.dart_pos = tuple(j for r in rot for j in range(len(r)))
        self.twin = tuple(self.dart_index[(v, u)] for (u, v) in darts)

        edges = set(self.edges)
        neg = set()
        for e in negative_edges:
            k = edge_key(*e)
            if k not in edges:
                raise SurfaceMapError(f"signed edge {k} is not an edge of the map")
            neg.add(k)
        self.negative_edges = frozenset(neg)
        self.negbit = tuple(1 if edge_key(u, v) in neg else 0 for (u, v) in darts)
        self.tags = dict(tags) if tags else {}

        hole_faces = set()
        for anchor in holes:
            u, v = anchor[0], anchor[1]
            side = anchor[2] if len(anchor) > 2 else PLUS
            d = self.dart_index.get((u, v))
            if d is None:
                raise BadHoleAnchor(f"hole anchor {u} {v} is not a dart of the map")
            hole_faces.add(self.face_of_state[2 * d + side])
        self.holes = frozenset(hole_faces)

    # -- basic structure -------------------------------------------------
    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Undirected edges ``(u, v)`` with ``u < v`` in dart order."""
        return tuple((u, v) for (u, v) in self.darts if u < v)

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def sign(self, u: int, v: int) -> int:
        return -1 if edge_key(u, v) in self.negative_edges else 1

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.dart_index

    @property
    def edge_count(self) -> int:
        return len(self.darts) // 2

    @cached_property
    def isolated_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, r in enumerate(self.rotations) if not r)

    # -- face tracing ----------------------------------------------------
    def next_state(self, st: int) -> int:
        d, s = st >> 1, st & 1
        s ^= self.negbit[d]
        t = self.twin[d]
        v = self.darts[d][1]
        ring = self.rot_darts[v]
        step = 1 if s == PLUS else -1
        nd = ring[(self.dart_pos[t] + step) % len(ring)]
        return 2 * nd + s

    def mirror_state(self, st: int) -> int:
        """The same edge-side seen while walking the face the other way."""
        d, s = st >> 1, st & 1
        return 2 * self.twin[d] + (1 - (s ^ self.negbit[d]))

    @cached_property
    def _traced(self):
        nstates = 2 * len(self.darts)
        face_of = [-1] * nstates
        walks = []
        for st in range(nstates):
            if face_of[st] >= 0:
                continue
            fid = len(walks)
            orbit = []
            x = st
            while face_of[x] < 0:
                face_of[x] = fid
                orbit.append(x)
                x = self.next_state(x)
            m = self.mirror_state(st)
            if face_of[m] >= 0:
                raise SurfaceMapError("face orbit coincides with its mirror")
            x = m
            while face_of[x] < 0:
                face_of[x] = fid
                x = self.next_state(x)
            darts = tuple(x >> 1 for x in orbit)
            walks.append(FacialWalk(fid, tuple(orbit), darts,
                                    tuple(self.darts[d][0] for d in darts)))
        return tuple(walks), tuple(face_of)

    @property
    def faces(self) -> tuple[FacialWalk, ...]:
        return self._traced[0]

    @property
    def face_of_state(self) -> tuple[int, ...]:
        return self._traced[1]

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def corner_face(self, v: int, j: int) -> int:
        """Face at the corner of ``v`` between its ``j``-th and next neighbour."""
        ring = self.rot_darts[v]
        return self.face_of_state[2 * ring[(j + 1) % len(ring)]]

    def edge_faces(self, u: int, v: int) -> tuple[int, int]:
        d = self.dart_index[(u, v)]
        return self.face_of_state[2 * d], self.face_of_state[2 * d + 1]

    @cached_property
    def face_edges(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(edge_key(*self.darts[d]) for d in w.darts) for w in self.faces)

    def plus_anchor(self, face: int) -> tuple[int, int]:
        """Smallest dart whose ``+`` state lies on ``face``."""
        best = min(st for st in range(0, 2 * len(self.darts), 2) if self.face_of_state[st] == face)
        return self.darts[best >> 1]

    # -- global invariants -----------------------------------------------
    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count

    def is_connected(self) -> bool:
        n = self.vertex_count
        if n == 0:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in self.rotations[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == n

    def switching_signs(self) -> tuple[list[int], bool]:
        """Vertex signs making every spanning-forest edge positive.

        Returns ``(lam, orientable)`` where ``lam[v]`` is +1/-1 and
        ``orientable`` tells whether all edges become positive.
        """
        n = self.vertex_count
        lam = [0] * n
        for root in range(n):
            if lam[root]:
                continue
            lam[root] = 1
            queue = deque([root])
            while queue:
                v = queue.popleft()
                for w in self.rotations[v]:
                    if not lam[w]:
                        lam[w] = lam[v] * self.sign(v, w)
                        queue.append(w)
        orientable = all(lam[u] * lam[v] * self.sign(u, v) == 1 for (u, v) in self.edges)
        return lam, orientable

    @property
    def orientable(self) -> bool:
        return self.switching_signs()[1]

    def switch(self, vertices: Iterable[int]) -> "SurfaceMap":
        """Resign at ``vertices``: reverse their rotations, flip incident signs."""
        flip = set(vertices)
        rot = [tuple(reversed(r)) if v in flip else r for v, r in enumerate(self.rotations)]
        neg = set()
        for (u, v) in self.edges:
            negative = (u, v) in self.negative_edges
            if (u in flip) != (v in flip):
                negative = not negative
            if negative:
                neg.add((u, v))
        holes = []
        for f in self.holes:
            st = self.faces[f].states[0]
            u, v = self.darts[st >> 1]
            side = st & 1
            if u in flip:
                side ^= 1
            holes.append((u, v, side))
        return SurfaceMap(rot, neg, holes, self.tags)

    def normalized(self) -> "SurfaceMap":
        """Equivalent map with as many positive edges as switching allows.

        Orientable maps come back with every sign positive.
        """
        lam, _ = self.switching_signs()
        return self.switch(v for v in range(self.vertex_count) if lam[v] < 0)

    def hole_walks(self) -> list[FacialWalk]:
        return [self.faces[f] for f in sorted(self.holes)]

    def structure(self):
        """Hashable summary used for equality and round-trip checks."""
        anchors = tuple(sorted(self.plus_anchor(f) for f in self.holes))
        return (self.rotations, tuple(sorted(self.negative_edges)), anchors,
                tuple(sorted(self.tags.items())))

    def __eq__(self, other):
        return isinstance(other, SurfaceMap) and self.structure() == other.structure()

    def __hash__(self):
        return hash(self.structure())

    def __repr__(self):
        return (f"SurfaceMap(V={self.vertex_count}, E={self.edge_count}, "
                f"F={self.face_count}, holes={len(self.holes)})")


def build_map(vertex_count: int, rotations, negative_edges=(), holes=(), tags=None) -> SurfaceMap:
    """Validate raw rotation data and return a traced :class:`SurfaceMap`.

    ``rotations`` may be a sequence indexed by vertex or a dict; vertices
    missing from a dict are isolated.
    """
    if isinstance(rotations, dict):
        rows = [rotations.get(v, ()) for v in range(vertex_count)]
        extra = set(rotations) - set(range(vertex_count))
        if extra:
            raise InvalidVertex(f"rotation given for unknown vertices {sorted(extra)}")
    else:
        rows = list(rotations)
        if len(rows) != vertex_count:
            raise InvalidVertex(f"expected {vertex_count} rotations, got {len(rows)}")
    return SurfaceMap(rows, negative_edges, holes, tags)


def trace_faces(m: SurfaceMap) -> tuple[FacialWalk, ...]:
    return m.faces


def euler_genus(m: SurfaceMap) -> tuple[int, bool]:
    """``(genus, orientable)`` of the closed surface carrying ``m``."""
    if not m.is_connected():
        raise DisconnectedMap("euler genus needs a connected map")
    return 2 - m.euler_characteristic, m.orientable


@dataclass
class TriangulationReport:
    ok: bool
    bad_faces: list[int]
    bad_holes: list[int]
    hole_count: int

    def __bool__(self):
        return self.ok


def validate_triangulation(m: SurfaceMap) -> TriangulationReport:
    """Every non-hole face must be a simple 3-cycle, every hole a simple cycle."""
    bad, bad_holes = [], []
    for w in m.faces:
        if w.face_id in m.holes:
            if not w.is_simple or w.length < 3:
                bad_holes.append(w.face_id)
        elif not w.is_triangle:
            bad.append(w.face_id)
    return TriangulationReport(not bad and not bad_holes, bad, bad_holes, len(m.holes))


def is_closed_triangulation(m: SurfaceMap) -> bool:
    return not m.holes and validate_triangulation(m).ok


def restrict_subgraph(m: SurfaceMap, keep_edges) -> SurfaceMap:
    """Sub-embedding on ``keep_edges``; rotations keep their induced order.

    Holes are dropped since the faces change.  Isolated vertices remain and
    are reported by :attr:`SurfaceMap.isolated_vertices`.
    """
    keep = {edge_key(*e) for e in keep_edges}
    missing = keep - m.edge_set
    if missing:
        raise SurfaceMapError(f"edges not in map: {sorted(missing)[:5]}")
    rot = [tuple(w for w in r if edge_key(v, w) in keep) for v, r in enumerate(m.rotations)]
    neg = [e for e in m.negative_edges if e in keep]
    return SurfaceMap(rot, neg, (), m.tags)


def relabel(m: SurfaceMap, perm: Sequence[int]) -> SurfaceMap:
    """Rename vertex ``v`` to ``perm[v]``."""
    n = m.vertex_count
    rot = [()] * n
    for v, r in enumerate(m.rotations):
        rot[perm[v]] = tuple(perm[w] for w in r)
    neg = [(perm[u], perm[v]) for (u, v) in m.negative_edges]
    holes = []
    for f in m.holes:
        st = m.faces[f].states[0]
        u, v = m.darts[st >> 1]
        holes.append((perm[u], perm[v], st & 1))
    tags = {perm[v]: t for v, t in m.tags.items()}
    return SurfaceMap(rot, neg, holes, tags)


def insert_face_vertices(m: SurfaceMap, faces=None, keep_edges: bool = True,
                         tag_colors: bool = False) -> SurfaceMap:
    """Add one new vertex per face in ``faces`` joined to all corners of it.

    New vertices are numbered ``V, V+1, ...`` in increasing face order.  With
    ``keep_edges=False`` the original edges are dropped, which yields the
    vertex-face incidence (radial) graph.  Every chosen face must have a
    simple boundary walk, otherwise the result would not be a simple graph.
    """
    chosen = sorted(range(m.face_count) if faces is None else set(faces))
    n = m.vertex_count
    new_id = {f: n + i for i, f in enumerate(chosen)}
    rot = []
    for v in range(n):
        row = []
        for j, w in enumerate(m.rotations[v]):
            if keep_edges:
                row.append(w)
            f = m.corner_face(v, j)
            if f in new_id:
                row.append(new_id[f])
        rot.append(row)
    neg = {e for e in m.negative_edges} if keep_edges else set()
    for f in chosen:
        walk = m.faces[f]
        if not walk.is_simple:
            raise SurfaceMapError(f"face {f} has a non-simple boundary walk")
        # reversed walk order matches the vertex frames when the side is +
        rot.append(list(reversed(walk.vertices)))
        for st in walk.states:
            if st & 1 == MINUS:
                neg.add(edge_key(m.darts[st >> 1][0], new_id[f]))
    tags = dict(m.tags)
    if tag_colors:
        tags = {v: "black" for v in range(n)}
        tags.update({new_id[f]: "white" for f in chosen})
    return SurfaceMap(rot, neg, (), tags)
