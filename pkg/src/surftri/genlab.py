"""Map generators, built-in fixtures and the Theorem-4.1 style certificates.

The exhaustive face-subset oracle lives in :mod:`surftri.oracle`.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    AnchorNotTriangle,
    GridTooSmall,
    NonOrientableInput,
    NonSimpleHoleBoundary,
    NotAFaceSubdivision,
    NotATriangulation,
    SurfaceMapError,
)
from .mapcore import (
    SurfaceMap,
    edge_key,
    euler_genus,
    insert_face_vertices,
    is_closed_triangulation,
    restrict_subgraph,
    validate_triangulation,
)

# hemi-icosahedron: K6 triangulating the projective plane
K6_PROJECTIVE_TRIANGLES = (
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
    (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
)


def from_triangles(vertex_count: int, triangles) -> SurfaceMap:
    """Signed rotation system of the closed surface glued from ``triangles``.

    Each vertex link must be a single cycle.  Rotations follow the link
    starting at its smallest vertex; signs are then fixed edge by edge so
    that the traced faces are exactly the given triangles.  The result is
    normalized, so orientable inputs come back with all signs positive.
    """
    links = [dict() for _ in range(vertex_count)]
    for tri in triangles:
        if len(set(tri)) != 3:
            raise NotATriangulation(f"degenerate triangle {tri}")
        a, b, c = tri
        for v, x, y in ((a, b, c), (b, c, a), (c, a, b)):
            links[v].setdefault(x, []).append(y)
            links[v].setdefault(y, []).append(x)
    rotations = []
    for v, link in enumerate(links):
        if not link:
            raise NotATriangulation(f"vertex {v} lies on no triangle")
        if any(len(ys) != 2 or ys[0] == ys[1] for ys in link.values()):
            raise NotATriangulation(f"link of vertex {v} is not a cycle")
        start = min(link)
        ring = [start]
        prev, cur = start, min(link[start])
        while cur != start:
            ring.append(cur)
            a, b = link[cur]
            prev, cur = cur, (b if a == prev else a)
        if len(ring) != len(link):
            raise NotATriangulation(f"link of vertex {v} is not connected")
        rotations.append(ring)
    succ = [{w: r[(i + 1) % len(r)] for i, w in enumerate(r)} for r in rotations]
    negative = [(u, v) for u, r in enumerate(rotations) for v in r
                if u < v and succ[u][v] == succ[v][u]]
    m = SurfaceMap(rotations, negative).normalized()
    if m.face_count != len(triangles):
        raise NotATriangulation("triangles do not glue to a closed surface")
    return m


def triangles_of(m: SurfaceMap) -> list[tuple[int, int, int]]:
    if not is_closed_triangulation(m):
        raise NotATriangulation("expected a closed triangulation")
    return [w.vertices for w in m.faces]


def sphere_triangle() -> SurfaceMap:
    """One triangle doubled: the sphere with two triangular faces."""
    return SurfaceMap([(1, 2), (2, 0), (0, 1)])


def k7_torus() -> SurfaceMap:
    return SurfaceMap([[(i + d) % 7 for d in (1, 3, 2, 6, 4, 5)] for i in range(7)])


def k6_projective() -> SurfaceMap:
    return from_triangles(6, K6_PROJECTIVE_TRIANGLES)


FIXTURES = {"k7": k7_torus, "k6": k6_projective, "sphere": sphere_triangle}


def grid_vertex(m: int, i: int, j: int) -> int:
    """Index of grid vertex (i, j); row ``j`` is ``j*m .. j*m + m - 1``."""
    return j * m + i


def torus_grid(m: int, n: int) -> SurfaceMap:
    """The 6-regular triangulation of the torus on the ``m x n`` grid.

    Vertex ``(i, j)`` has index ``j*m + i``; its rotation runs through the
    directions (1,0), (1,1), (0,1), (-1,0), (-1,-1), (0,-1).
    """
    if m < 3 or n < 3:
        raise GridTooSmall(f"torus grid needs m, n >= 3, got {m} x {n}")
    steps = ((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1))
    rot = []
    for j in range(n):
        for i in range(m):
            rot.append([((j + dj) % n) * m + (i + di) % m for di, dj in steps])
    return SurfaceMap(rot)


def grid_row(m: int, n: int, j: int) -> list[int]:
    return [(j % n) * m + i for i in range(m)]


def grid_column(m: int, n: int, i: int) -> list[int]:
    return [j * m + (i % m) for j in range(n)]


@dataclass
class GluedMap:
    map: SurfaceMap
    a_vertex: list[int]
    b_vertex: list[int]


def connected_sum(a: SurfaceMap, b: SurfaceMap, fa: int = 0, fb: int = 0) -> GluedMap:
    """Remove face ``fa`` of ``a`` and ``fb`` of ``b`` and glue the boundaries.

    Vertices of ``a`` keep their labels; the other vertices of ``b`` follow
    in order.  ``b_vertex[x]`` gives the new label of vertex ``x`` of ``b``.
    """
    for m, f in ((a, fa), (b, fb)):
        if not m.orientable:
            raise NonOrientableInput("connected sum expects orientable maps")
        if not 0 <= f < m.face_count or not m.faces[f].is_triangle or f in m.holes:
            raise AnchorNotTriangle(f"anchor face {f} is not a triangle")
    tri_a, tri_b = triangles_of(a), triangles_of(b)
    a0, a1, a2 = tri_a[fa]
    b0, b1, b2 = tri_b[fb]
    glue = {b0: a0, b1: a2, b2: a1}
    b_vertex = []
    nxt = a.vertex_count
    for x in range(b.vertex_count):
        if x in glue:
            b_vertex.append(glue[x])
        else:
            b_vertex.append(nxt)
            nxt += 1
    tris = [t for i, t in enumerate(tri_a) if i != fa]
    tris += [tuple(b_vertex[x] for x in t) for i, t in enumerate(tri_b) if i != fb]
    glued = from_triangles(nxt, tris)
    return GluedMap(glued, list(range(a.vertex_count)), b_vertex)


def face_distances(m: SurfaceMap, source: int) -> list[int]:
    """Breadth-first distance between faces across shared edges."""
    adj = [set() for _ in range(m.face_count)]
    for d in range(len(m.darts)):
        f, g = m.face_of_state[2 * d], m.face_of_state[2 * d + 1]
        adj[f].add(g)
        adj[g].add(f)
    dist = [-1] * m.face_count
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for f in frontier:
            for g in sorted(adj[f]):
                if dist[g] < 0:
                    dist[g] = dist[f] + 1
                    nxt.append(g)
        frontier = nxt
    return dist


def double_grid(m: int = 6, n: int = 6) -> GluedMap:
    """Two ``m x n`` torus grids glued at a pair of faces.

    The second grid is attached at the face farthest (in the dual graph)
    from face 0 of the first one, so the neck sits away from face 0.
    """
    a = torus_grid(m, n)
    dist = face_distances(a, 0)
    far = max(range(a.face_count), key=lambda f: (dist[f], -f))
    return connected_sum(a, torus_grid(m, n), far, 0)


def face_subdivision(t: SurfaceMap) -> SurfaceMap:
    """Insert a white vertex in every face; original vertices are black."""
    if not is_closed_triangulation(t):
        raise NotATriangulation("face subdivision needs a closed triangulation")
    return insert_face_vertices(t, tag_colors=True)


def insert_face_vertex(m: SurfaceMap, face: int) -> SurfaceMap:
    if not m.faces[face].is_triangle:
        raise NotATriangulation(f"face {face} is not a triangle")
    return insert_face_vertices(m, [face])


def random_refinement(m: SurfaceMap, steps: int, seed: int) -> SurfaceMap:
    """Apply ``steps`` single-face subdivisions at seeded random faces."""
    if not is_closed_triangulation(m):
        raise NotATriangulation("refinement needs a closed triangulation")
    rng = random.Random(seed)
    for _ in range(steps):
        m = insert_face_vertex(m, rng.randrange(m.face_count))
    return m


def fill_holes(m: SurfaceMap) -> SurfaceMap:
    """Forget hole marks, keeping their boundaries as ordinary faces."""
    for w in m.hole_walks():
        if not w.is_simple:
            raise NonSimpleHoleBoundary(f"hole face {w.face_id} has a non-simple boundary")
    if not m.holes:
        return m
    return SurfaceMap(m.rotations, m.negative_edges, (), m.tags)


# -- face subdivision certificates --------------------------------------

@dataclass
class CountingCertificate:
    """Arithmetic record of the black/white counting argument.

    ``W_bound`` is the largest white count any spanning triangulated
    sphere with ``gprime`` holes could accommodate (``2B + 2g' - 4``).
    The patch-dependent fields stay ``None`` unless a concrete patch
    was supplied.
    """
    B: int
    W: int
    g: int
    gprime: int
    W_bound: int
    identity_holds: bool
    verdict: str
    ell: int | None = None
    W2: int | None = None
    W2_bound: Fraction | None = None
    E_Hprime: int | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self):
        d = {k: getattr(self, k) for k in ("B", "W", "g", "gprime", "W_bound",
                                           "identity_holds", "verdict", "ell", "W2",
                                           "E_Hprime")}
        d["W2_bound"] = None if self.W2_bound is None else str(self.W2_bound)
        return d


def check_face_subdivision(m: SurfaceMap) -> tuple[list[int], list[int]]:
    """Return ``(black, white)`` after checking the subdivision structure."""
    if not m.tags:
        raise NotAFaceSubdivision("map carries no black/white tags")
    black = [v for v in range(m.vertex_count) if m.tags.get(v) == "black"]
    white = [v for v in range(m.vertex_count) if m.tags.get(v) == "white"]
    if len(black) + len(white) != m.vertex_count:
        raise NotAFaceSubdivision("every vertex must be tagged black or white")
    whites = set(white)
    for w in white:
        if m.degree(w) != 3:
            raise NotAFaceSubdivision(f"white vertex {w} has degree {m.degree(w)}")
        if any(x in whites for x in m.rotations[w]):
            raise NotAFaceSubdivision(f"white vertex {w} has a white neighbour")
    if not is_closed_triangulation(m):
        raise NotAFaceSubdivision("subdivided map is not a closed triangulation")
    black_edges = [e for e in m.edges if e[0] not in whites and e[1] not in whites]
    base = restrict_subgraph(m, black_edges)
    black_faces = [w for w in base.faces if w.vertices]
    if not all(w.is_triangle for w in black_faces):
        raise NotAFaceSubdivision("black edges do not form a triangulation")
    if len(black_faces) != len(white):
        raise NotAFaceSubdivision("white vertices do not match black faces one to one")
    face_sets = {frozenset(w.vertices) for w in black_faces}
    for w in white:
        if frozenset(m.rotations[w]) not in face_sets:
            raise NotAFaceSubdivision(f"white vertex {w} does not sit in a black face")
    black_chi = len(black) - len(black_edges) + len(black_faces)
    if 2 - black_chi != euler_genus(m)[0]:
        raise NotAFaceSubdivision("black triangulation lives on a different surface")
    return black, white


def no_spanning_certificate(sub: SurfaceMap, gprime: int, patch=None) -> CountingCertificate:
    """Decide from counts alone whether a spanning triangulated ``S_{g'}`` can exist.

    ``patch`` (a :class:`~surftri.spanner.SpanningPatch`) is optional; when
    given, the patch-specific quantities ``ell``, ``W2`` and ``|E(H')|`` are
    filled in from it.
    """
    black, white = check_face_subdivision(sub)
    g, _ = euler_genus(sub)
    B, W = len(black), len(white)
    bound = 2 * B + 2 * gprime - 4
    identity = W == 2 * B + 2 * g - 4
    if g >= 1 and identity and W > bound:
        verdict = "impossible"
    else:
        verdict = "inconclusive"
    cert = CountingCertificate(B, W, g, gprime, bound, identity, verdict)
    if patch is not None:
        whites = set(white)
        on_holes = {v for walk in patch.hole_walks for v in walk}
        w2 = whites & on_holes
        w1 = whites - on_holes
        cert.ell = sum(len(walk) for walk in patch.hole_walks)
        cert.W2 = len(w2)
        cert.W2_bound = Fraction(cert.ell, 2)
        cert.E_Hprime = sum(1 for (u, v) in patch.kept_edges if u not in w1 and v not in w1)
        if cert.W2 > cert.W2_bound:
            cert.notes.append("W2 exceeds ell/2")
    return cert
