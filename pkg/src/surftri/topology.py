"""Cycle topology on embedded graphs.

The workhorse is :func:`subsurface`: it takes a set of faces, optionally a
set of edges to cut open, and builds the surface-with-boundary those faces
form on their own.  Every vertex is split into one copy per *fan*, a maximal
run of its corners lying in chosen faces and joined across uncut edges.
Cutting along a cycle, excising a region and measuring a region's Euler
characteristic are all special cases.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    CycleContractible,
    CyclesShareVertex,
    CycleTouchesItself,
    MapHasHoles,
    NotACycle,
    SurgeryError,
)
from .mapcore import MINUS, PLUS, SurfaceMap, edge_key


@dataclass(frozen=True)
class CycleRef:
    """A simple cycle given by its vertex sequence (length >= 3)."""
    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> frozenset:
        vs = self.vertices
        return frozenset(edge_key(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))

    def dart_pairs(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def darts(self, m: SurfaceMap) -> tuple[int, ...]:
        return tuple(m.dart_index[p] for p in self.dart_pairs())

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def canonical(self) -> tuple[int, ...]:
        """Rotation/reflection-invariant form: least start, least direction."""
        vs = self.vertices
        k = vs.index(min(vs))
        fwd = vs[k:] + vs[:k]
        back = (fwd[0],) + tuple(reversed(fwd[1:]))
        return min(fwd, back)

    def __str__(self):
        return " ".join(map(str, self.vertices))


def make_cycle(m: SurfaceMap, vertices: Sequence[int]) -> CycleRef:
    vs = tuple(int(v) for v in vertices)
    if len(vs) < 3:
        raise NotACycle("a cycle needs at least 3 vertices")
    if len(set(vs)) != len(vs):
        raise CycleTouchesItself(f"vertex repeated in cycle {vs}")
    for i, v in enumerate(vs):
        w = vs[(i + 1) % len(vs)]
        if not m.has_edge(v, w):
            raise NotACycle(f"{v}-{w} is not an edge")
    return CycleRef(vs)


# -- subsurfaces --------------------------------------------------------

@dataclass
class Subsurface:
    """Result of :func:`subsurface`.

    ``vertex_origin[x]`` is the original vertex of new vertex ``x``;
    ``face_origin[f]`` the original face of new face ``f`` (``None`` for
    freshly created boundary faces, listed in ``new_boundaries``).
    """
    map: SurfaceMap
    vertex_origin: list[int]
    face_origin: dict[int, int | None]
    new_boundaries: list[int]

    def boundary_walks(self) -> list[tuple[int, ...]]:
        return [tuple(self.vertex_origin[v] for v in self.map.faces[f].vertices)
                for f in self.new_boundaries]


def subsurface(m: SurfaceMap, faces: Iterable[int] | None = None,
               cut_edges: Iterable = ()) -> Subsurface:
    """Surface formed by ``faces`` alone, with ``cut_edges`` sliced open.

    Boundary walks of the result become hole faces; holes of ``m`` lying in
    ``faces`` stay holes.  Vertex rotations keep their local frame, so the
    result carries the same edge signs.
    """
    chosen = set(range(m.face_count)) if faces is None else set(faces)
    cut = {edge_key(*e) for e in cut_edges}
    fos = m.face_of_state
    fans = []                      # (vertex, [(neighbour, key), ...])
    lookup = {}
    for v in range(m.vertex_count):
        ring = m.rot_darts[v]
        k = len(ring)
        if not k:
            continue
        cin = [fos[2 * ring[(j + 1) % k]] in chosen for j in range(k)]
        nbrs = m.rotations[v]
        # edge j sits between corner j-1 and corner j
        open_edge = [cin[j - 1] and cin[j] and edge_key(v, nbrs[j]) not in cut for j in range(k)]
        if all(open_edge):
            entries = [(w, -1 - min(ring[j], m.twin[ring[j]])) for j, w in enumerate(nbrs)]
            lookup.update({(v, key): len(fans) for _, key in entries})
            fans.append((v, entries))
            continue
        j0 = open_edge.index(False)
        entries = None
        for t in range(k):
            j = (j0 + t) % k
            if not cin[j]:
                continue
            if entries is None:
                st = 2 * ring[j] + MINUS
                entries = [(nbrs[j], min(st, m.mirror_state(st)))]
            j1 = (j + 1) % k
            if open_edge[j1]:
                d = ring[j1]
                entries.append((nbrs[j1], -1 - min(d, m.twin[d])))
            else:
                st = 2 * ring[j1] + PLUS
                entries.append((nbrs[j1], min(st, m.mirror_state(st))))
                if entries[0][0] == entries[-1][0]:
                    raise SurgeryError(f"fan at vertex {v} closes on a single edge")
                lookup.update({(v, key): len(fans) for _, key in entries})
                fans.append((v, entries))
                entries = None
    rot = []
    neg = []
    for v, entries in fans:
        row = []
        for w, key in entries:
            x = lookup[(w, key)]
            row.append(x)
            if edge_key(v, w) in m.negative_edges:
                neg.append((len(rot), x))
        rot.append(row)

    def image(st):
        d, s = st >> 1, st & 1
        u, v = m.darts[d]
        if fos[2 * d] in chosen and fos[2 * d + 1] in chosen and edge_key(u, v) not in cut:
            key = -1 - min(d, m.twin[d])
        else:
            key = min(st, m.mirror_state(st))
        return (lookup[(u, key)], lookup[(v, key)], s)

    anchors = {f: image(m.faces[f].states[0]) for f in sorted(chosen)}
    new = SurfaceMap(rot, neg, [anchors[f] for f in sorted(chosen & m.holes)], m.tags and {
        i: m.tags[v] for i, (v, _) in enumerate(fans) if v in m.tags})
    face_origin = {}
    for f, (a, b, s) in anchors.items():
        face_origin[new.face_of_state[2 * new.dart_index[(a, b)] + s]] = f
    fresh = [f for f in range(new.face_count) if f not in face_origin]
    for f in fresh:
        face_origin[f] = None
    if fresh:
        holes = [(*new.plus_anchor(f), PLUS) for f in sorted(set(fresh) | new.holes)]
        new = SurfaceMap(new.rotations, new.negative_edges, holes, new.tags)
    return Subsurface(new, [v for v, _ in fans], face_origin, fresh)


def components(sub: Subsurface) -> list[Subsurface]:
    """Split a subsurface into its connected pieces (vertex order kept)."""
    m = sub.map
    comp = [-1] * m.vertex_count
    count = 0
    for s in range(m.vertex_count):
        if comp[s] >= 0:
            continue
        comp[s] = count
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in m.rotations[v]:
                if comp[w] < 0:
                    comp[w] = count
                    queue.append(w)
        count += 1
    if count == 1:
        return [sub]
    pieces = []
    for c in range(count):
        verts = [v for v in range(m.vertex_count) if comp[v] == c]
        index = {v: i for i, v in enumerate(verts)}
        rot = [[index[w] for w in m.rotations[v]] for v in verts]
        neg = [(index[a], index[b]) for (a, b) in m.negative_edges if comp[a] == c]
        faces = [f for f in range(m.face_count) if comp[m.faces[f].vertices[0]] == c]
        anchors = {}
        for f in faces:
            st = m.faces[f].states[0]
            a, b = m.darts[st >> 1]
            anchors[f] = (index[a], index[b], st & 1)
        tags = {index[v]: t for v, t in m.tags.items() if comp[v] == c}
        piece = SurfaceMap(rot, neg, [anchors[f] for f in faces if f in m.holes], tags)
        origin = {}
        fresh = []
        for f in faces:
            a, b, s = anchors[f]
            nf = piece.face_of_state[2 * piece.dart_index[(a, b)] + s]
            origin[nf] = sub.face_origin[f]
            if f in sub.new_boundaries:
                fresh.append(nf)
        pieces.append(Subsurface(piece, [sub.vertex_origin[v] for v in verts], origin, sorted(fresh)))
    return pieces


# -- regions --------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """A connected set of faces of a host map, analysed as a surface.

    ``euler_char`` counts the region cut open along its boundary, which
    agrees with ``V_R - E_R + |faces|`` whenever the closure is embedded.
    ``hole_faces`` lists host holes inside the region; disks and cylinders
    are required to contain none.
    """
    faces: frozenset
    euler_char: int
    boundary_walks: tuple[tuple[int, ...], ...]
    orientable: bool
    contains_vertex_interior: bool
    interior_vertices: frozenset
    hole_faces: frozenset

    @property
    def is_disk(self) -> bool:
        return self.euler_char == 1 and len(self.boundary_walks) == 1 and not self.hole_faces

    @property
    def is_cylinder(self) -> bool:
        return (self.euler_char == 0 and self.orientable and len(self.boundary_walks) == 2
                and not self.hole_faces)

    @property
    def closure_vertices(self) -> frozenset:
        return self.interior_vertices.union(*map(frozenset, self.boundary_walks))


def region_of(piece: Subsurface, host: SurfaceMap) -> Region:
    m = piece.map
    faces = frozenset(f for f in piece.face_origin.values() if f is not None)
    on_boundary = {v for f in piece.new_boundaries for v in m.faces[f].vertices}
    interior = frozenset(piece.vertex_origin[v] for v in range(m.vertex_count)
                         if v not in on_boundary)
    chi = m.vertex_count - m.edge_count + len(faces)
    return Region(faces, chi, tuple(piece.boundary_walks()), m.orientable, bool(interior),
                  interior, faces & host.holes)


def regions(m: SurfaceMap, faces=None, cut_edges=()) -> list[Region]:
    return [region_of(p, m) for p in components(subsurface(m, faces, cut_edges))]


# -- cutting and classification ------------------------------------------

def cut_along(m: SurfaceMap, c: CycleRef) -> list[Subsurface]:
    """Cut ``m`` open along ``c``; returns the connected pieces.

    The new boundary faces are holes of each piece.  Across all pieces
    ``sum(V - E + F - new boundaries)`` equals ``V - E + F`` of ``m``.
    """
    make_cycle(m, c.vertices)
    return components(subsurface(m, None, c.edges))


def classify_cycle(m: SurfaceMap, c: CycleRef) -> str:
    """One of ``contractible``, ``separating`` (noncontractible) or ``nonseparating``."""
    pieces = cut_along(m, c)
    if len(pieces) == 1:
        return "nonseparating"
    for p in pieces:
        r = region_of(p, m)
        if r.is_disk and set(r.boundary_walks[0]) <= c.vertex_set:
            return "contractible"
    return "separating"


def is_separating(m: SurfaceMap, c: CycleRef) -> bool:
    return len(cut_along(m, c)) >= 2


def is_contractible(m: SurfaceMap, c: CycleRef) -> bool:
    return classify_cycle(m, c) == "contractible"


def classify_cycle_by_faces(m: SurfaceMap, c: CycleRef) -> str:
    """Same verdict as :func:`classify_cycle`, by counting instead of surgery.

    Faces are flooded without crossing ``c``; a separating cycle splits them
    in two sides whose characteristic is ``V - E + F`` over the side, with
    the cycle itself counted once.  A side is a disk iff that number is 1.
    """
    make_cycle(m, c.vertices)
    cyc = c.edges
    adj = [[] for _ in range(m.face_count)]
    for d, (u, v) in enumerate(m.darts):
        if u < v and (u, v) not in cyc:
            f, g = m.face_of_state[2 * d], m.face_of_state[2 * d + 1]
            adj[f].append(g)
            adj[g].append(f)
    d0 = m.dart_index[c.dart_pairs()[0]]
    start, other = m.face_of_state[2 * d0], m.face_of_state[2 * d0 + 1]
    side = {start}
    queue = deque([start])
    while queue:
        f = queue.popleft()
        for g in adj[f]:
            if g not in side:
                side.add(g)
                queue.append(g)
    if other in side:
        return "nonseparating"
    on_cycle = c.vertex_set
    for part in (side, set(range(m.face_count)) - side):
        if part & m.holes:
            continue
        verts = set()
        edges = set()
        for f in part:
            verts.update(m.faces[f].vertices)
            edges |= m.face_edges[f]
        chi = len(verts - on_cycle) + len(on_cycle) - len(edges) + len(part)
        if chi == 1:
            return "contractible"
    return "separating"


def _two_cycle_pieces(m, c, d):
    if c.vertex_set & d.vertex_set:
        raise CyclesShareVertex("cycles must be vertex-disjoint")
    return components(subsurface(m, None, c.edges | d.edges))


def cylinders_between(m: SurfaceMap, c: CycleRef, d: CycleRef) -> list[Region]:
    """Hole-free cylinder components of ``m`` cut along ``c`` and ``d``
    whose two boundaries come one from each cycle."""
    out = []
    for p in _two_cycle_pieces(m, c, d):
        r = region_of(p, m)
        if not r.is_cylinder:
            continue
        sides = []
        for walk in r.boundary_walks:
            ws = set(walk)
            sides.append("c" if ws <= c.vertex_set else "d" if ws <= d.vertex_set else "?")
        if sorted(sides) == ["c", "d"]:
            out.append(r)
    return out


def are_homotopic_disjoint(m: SurfaceMap, c: CycleRef, d: CycleRef) -> bool:
    if c.vertex_set & d.vertex_set:
        raise CyclesShareVertex("cycles must be vertex-disjoint")
    for x in (c, d):
        if classify_cycle(m, x) == "contractible":
            raise CycleContractible(f"cycle {x} is contractible")
    return bool(cylinders_between(m, c, d))


def region_between(m: SurfaceMap, c: CycleRef, d: CycleRef, side_anchor) -> Region:
    """Component of ``m`` cut along ``c`` and ``d`` holding the face of the
    ``+`` state of dart ``side_anchor`` (a pair ``(u, v)`` on ``c``).

    For a positive edge the reversed dart picks the opposite side.
    """
    u, v = side_anchor
    if edge_key(u, v) not in c.edges:
        raise NotACycle(f"anchor {u}->{v} is not an edge of the cycle")
    face = m.face_of_state[2 * m.dart_index[(u, v)] + PLUS]
    return region_containing(m, c, d, face)


def region_containing(m: SurfaceMap, c: CycleRef, d: CycleRef, face: int) -> Region:
    for p in _two_cycle_pieces(m, c, d):
        if face in p.face_origin.values():
            return region_of(p, m)
    raise NotACycle(f"face {face} not found after cutting")


# -- radial graph and short cycles --------------------------------------

@dataclass
class RadialGraph:
    """Vertex/face incidence graph with its inherited embedding.

    Nodes ``0..V-1`` are host vertices, node ``V + f`` is host face ``f``.
    """
    host: SurfaceMap
    map: SurfaceMap

    def label(self, node: int) -> str:
        n = self.host.vertex_count
        return f"v{node}" if node < n else f"f{node - n}"

    @property
    def node_count(self) -> int:
        return self.map.vertex_count

    @property
    def edge_count(self) -> int:
        return self.map.edge_count


def radial_graph(m: SurfaceMap) -> RadialGraph:
    from .mapcore import insert_face_vertices
    if m.holes:
        raise MapHasHoles("radial graph needs a map without holes")
    return RadialGraph(m, insert_face_vertices(m, keep_edges=False))


def _bfs_tree(m: SurfaceMap, source: int, allowed):
    """BFS inside ``allowed`` first, then extended to a spanning tree of ``m``.

    Returns ``(parent, depth, reached)``; ``reached`` marks vertices found in
    the first phase, whose tree paths stay inside ``allowed``.
    """
    n = m.vertex_count
    parent = [-1] * n
    depth = [-1] * n
    depth[source] = 0
    order = [source]
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in m.rotations[v]:
            if depth[w] < 0 and (allowed is None or w in allowed):
                depth[w] = depth[v] + 1
                parent[w] = v
                order.append(w)
                queue.append(w)
    reached = [d >= 0 for d in depth]
    queue = deque(order)
    while queue:
        v = queue.popleft()
        for w in m.rotations[v]:
            if depth[w] < 0:
                depth[w] = depth[v] + 1
                parent[w] = v
                queue.append(w)
    if min(depth) < 0:
        from .errors import DisconnectedMap
        raise DisconnectedMap("map is not connected")
    return parent, depth, reached


def _classify_nontree_edges(m: SurfaceMap, parent):
    """Classify the fundamental cycle of every non-tree edge.

    The duals of the non-tree edges form a connected graph ``D`` on the
    faces.  A fundamental cycle is nonseparating iff its dual edge is not a
    bridge of ``D``; a bridge gives a contractible cycle iff one of its two
    sides is a tree in ``D`` (that side is then a disk).

    Returns ``{edge: 'contractible' | 'separating' | 'nonseparating'}``.
    """
    tree = {edge_key(v, p) for v, p in enumerate(parent) if p >= 0}
    F = m.face_count
    adj = [[] for _ in range(F)]
    nontree = []
    for d, (u, v) in enumerate(m.darts):
        if u < v and (u, v) not in tree:
            eid = len(nontree)
            nontree.append((u, v))
            f, g = m.face_of_state[2 * d], m.face_of_state[2 * d + 1]
            adj[f].append((g, eid))
            if g != f:
                adj[g].append((f, eid))
    M = len(nontree)
    tin = [-1] * F
    low = [0] * F
    size = [1] * F
    cnt = [0] * F          # D-edges whose top endpoint is this node
    sub_edges = [0] * F
    tree_edge_child = {}
    timer = 0
    tin[0] = low[0] = timer
    stack = [(0, -1, iter(adj[0]))]
    while stack:
        node, pe, it = stack[-1]
        advanced = False
        for nb, eid in it:
            if eid == pe:
                continue
            if tin[nb] < 0:
                timer += 1
                tin[nb] = low[nb] = timer
                cnt[node] += 1
                tree_edge_child[eid] = nb
                stack.append((nb, eid, iter(adj[nb])))
                advanced = True
                break
            if tin[nb] <= tin[node]:
                # back edge to an ancestor (or a self-loop)
                low[node] = min(low[node], tin[nb])
                cnt[nb] += 1
        if advanced:
            continue
        stack.pop()
        sub_edges[node] += cnt[node]
        if stack:
            par = stack[-1][0]
            low[par] = min(low[par], low[node])
            size[par] += size[node]
            sub_edges[par] += sub_edges[node]
    if min(tin) < 0:
        raise SurgeryError("dual of the cotree is disconnected")
    verdict = {}
    for eid, e in enumerate(nontree):
        child = tree_edge_child.get(eid)
        if child is None or low[child] < tin[child]:
            verdict[e] = "nonseparating"
            continue
        n1, m1 = size[child], sub_edges[child]
        if m1 == n1 - 1 or (M - m1 - 1) == (F - n1 - 1):
            verdict[e] = "contractible"
        else:
            verdict[e] = "separating"
    return verdict


def _tree_cycle(parent, depth, x, y):
    left, right = [x], [y]
    a, b = x, y
    while depth[a] > depth[b]:
        a = parent[a]
        left.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        right.append(b)
    while a != b:
        a, b = parent[a], parent[b]
        left.append(a)
        right.append(b)
    right.pop()
    return tuple(left[::-1] + right)


NONCONTRACTIBLE = ("separating", "nonseparating")


def candidate_cycles(m: SurfaceMap, kinds=NONCONTRACTIBLE, forbidden=(), limit=None,
                     max_length=None, sources=None):
    """Fundamental cycles of BFS trees from every allowed source.

    Only cycles whose class is in ``kinds`` and which avoid ``forbidden``
    are kept.  Result is deduplicated and sorted by (length, canonical
    vertex sequence); the first entry is a shortest such cycle.
    """
    forbidden = set(forbidden)
    allowed = None if not forbidden else set(range(m.vertex_count)) - forbidden
    found = {}
    best = max_length
    for s in (sources if sources is not None else range(m.vertex_count)):
        if s in forbidden or not m.rotations[s]:
            continue
        parent, depth, reached = _bfs_tree(m, s, allowed)
        verdict = _classify_nontree_edges(m, parent)
        for (x, y), kind in verdict.items():
            if kind not in kinds or not (reached[x] and reached[y]):
                continue
            if limit == 1 and best is not None and depth[x] + depth[y] + 1 > best + 2 * depth[s]:
                continue
            cyc = CycleRef(_tree_cycle(parent, depth, x, y))
            if len(cyc.vertices) < 3:
                continue
            if limit == 1 and best is not None and cyc.length > best:
                continue
            key = cyc.canonical()
            if key not in found:
                found[key] = (kind, CycleRef(key))
                if limit == 1 and (best is None or cyc.length < best):
                    best = cyc.length
    ordered = sorted(found.items(), key=lambda kv: (len(kv[0]), kv[0]))
    out = [cyc for _, (_, cyc) in ordered]
    return out if limit is None else out[:limit]


def shortest_noncontractible_cycle(m: SurfaceMap, forbidden=()) -> CycleRef:
    from .errors import SphereHasNone
    if m.holes:
        raise MapHasHoles("fill holes before searching for short cycles")
    from .mapcore import euler_genus
    if euler_genus(m)[0] == 0:
        raise SphereHasNone("every cycle on the sphere is contractible")
    found = candidate_cycles(m, NONCONTRACTIBLE, forbidden, limit=1)
    if not found:
        raise SphereHasNone("no noncontractible cycle avoids the forbidden vertices")
    return found[0]


def shortest_nonseparating_cycle(m: SurfaceMap, forbidden=()) -> CycleRef | None:
    found = candidate_cycles(m, ("nonseparating",), forbidden, limit=1)
    return found[0] if found else None


@dataclass(frozen=True)
class FacewidthResult:
    width: int
    witness: tuple[str, ...]
    radial_cycle: CycleRef


def facewidth(m: SurfaceMap) -> FacewidthResult:
    """Facewidth via the shortest noncontractible cycle of the radial graph."""
    rg = radial_graph(m)
    cyc = shortest_noncontractible_cycle(rg.map)
    return FacewidthResult(cyc.length // 2, tuple(rg.label(x) for x in cyc.vertices), cyc)
