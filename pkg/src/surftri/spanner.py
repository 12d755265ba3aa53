"""Spanning spheres-with-holes inside surface triangulations.

A *patch* is a set of kept edges.  It is accepted when the triangles it
bounds (each a face of its own sub-embedding enclosing a disk of the host)
glue to a sphere with ``b`` holes that reaches every vertex.

Finders:

* :func:`find_spanning_cylinder_torus` grows the strip between two disjoint
  homotopic cycles until it touches every vertex; what is left over is an
  open strip with no vertex inside.
* :func:`find_spanning_sphere_general` cuts one vertex-free cylinder per
  handle out of a higher-genus orientable surface.

Both run their result through :func:`verify_spanning_patch` before
returning, so a returned patch is always correct.  They can fail with
:class:`~surftri.errors.NotFound` on inputs of low facewidth.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    CycleContractible,
    CyclesShareVertex,
    MapHasHoles,
    NoExpansionMove,
    NoShrinkMove,
    NotACycle,
    NotATorus,
    NotATriangulation,
    NotFound,
    SurfaceMapError,
    VerifierRejected,
)
from .mapcore import PLUS, SurfaceMap, edge_key, euler_genus, relabel, restrict_subgraph, validate_triangulation
from .topology import (
    CycleRef,
    Region,
    are_homotopic_disjoint,
    candidate_cycles,
    components,
    cut_along,
    make_cycle,
    region_containing,
    region_of,
    subsurface,
)

# -- width functions -------------------------------------------------------


def double_factorial(n: int) -> int:
    """``n!!`` with ``(-1)!! = 0!! = 1``."""
    if n < -1:
        raise ValueError("double factorial needs n >= -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@lru_cache(maxsize=None)
def phi(h: int, q: int) -> int:
    if h < 1 or q < 0:
        raise ValueError("phi needs h >= 1 and q >= 0")
    if h == 1:
        return 2 * q + 5
    return (2 * q + 2) * (phi(h - 1, q + 2) + 5) + 1


def gamma(h: int) -> int:
    """Closed form ``(4h+1) 2^(h-1) (2h-3)!! + sum_{i<h-1} (20i+11) 2^i (2i-1)!!``.

    Computed independently of :func:`phi`; the two agree for every ``h``.
    """
    if h < 1:
        raise ValueError("gamma needs h >= 1")
    head = (4 * h + 1) * 2 ** (h - 1) * double_factorial(2 * h - 3)
    return head + sum((20 * i + 11) * 2 ** i * double_factorial(2 * i - 1) for i in range(h - 1))


@dataclass
class WidthTable:
    """Exact values of ``phi`` and ``gamma`` for ``h <= hmax``, ``q <= qmax``."""
    hmax: int
    qmax: int = 3
    phi: dict = field(init=False)
    gamma: dict = field(init=False)

    def __post_init__(self):
        self.phi = {(h, q): phi(h, q) for h in range(1, self.hmax + 1)
                    for q in range(self.qmax + 1)}
        self.gamma = {h: gamma(h) for h in range(1, self.hmax + 1)}


# -- patches and the verifier -------------------------------------------


@dataclass(frozen=True)
class SpanningPatch:
    """A verified spanning sphere-with-holes.

    ``certificate`` is ``(V_H, E_H, F_tri, chi, b)`` with
    ``chi = V_H - E_H + F_tri = 2 - b``.
    """
    host: SurfaceMap = field(repr=False)
    kept_edges: frozenset = field(repr=False)
    triangle_faces: frozenset = field(repr=False)
    hole_walks: tuple[tuple[int, ...], ...]
    genus_of_patch: int
    hole_count: int
    certificate: tuple[int, int, int, int, int]

    def as_dict(self) -> dict:
        V, E, F, chi, b = self.certificate
        return {"vertices": V, "edges": E, "triangles": F, "chi": chi, "holes": b,
                "genus": self.genus_of_patch}


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    patch: SpanningPatch | None
    reasons: tuple[str, ...] = ()

    def __bool__(self):
        return self.accepted


def _face_blocks(m: SurfaceMap, kept: frozenset) -> list[int]:
    """Union host faces across edges that are not kept."""
    parent = list(range(m.face_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for d, (u, v) in enumerate(m.darts):
        if u < v and (u, v) not in kept:
            a, b = find(m.face_of_state[2 * d]), find(m.face_of_state[2 * d + 1])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(f) for f in range(m.face_count)]


def verify_spanning_patch(m: SurfaceMap, kept_edges) -> VerifyResult:
    """Check that ``kept_edges`` span a triangulated sphere with holes.

    Each face of the restricted embedding counts as a triangle when its
    walk is a simple 3-cycle and the host faces it covers form a disk.
    The triangles must glue to a connected orientable genus-0 surface that
    passes each host vertex exactly once; ``b`` is its number of boundary
    circles, each of which must be simple.
    """
    kept = frozenset(edge_key(u, v) for u, v in kept_edges)
    missing = kept - m.edge_set
    if missing:
        return VerifyResult(False, None, (f"edge {min(missing)} is not in the host",))
    if m.holes:
        return VerifyResult(False, None, ("host has holes",))
    h = restrict_subgraph(m, kept)
    reasons = []
    if h.isolated_vertices:
        reasons.append(f"isolated vertices {list(h.isolated_vertices)[:5]}")
    block = _face_blocks(m, kept)
    members: dict[int, list[int]] = {}
    for f, r in enumerate(block):
        members.setdefault(r, []).append(f)
    chosen = set()
    triangles = 0
    seen_blocks = set()
    for walk in h.faces:
        d, s = walk.states[0] >> 1, walk.states[0] & 1
        host_face = m.face_of_state[2 * m.dart_index[h.darts[d]] + s]
        r = block[host_face]
        if r in seen_blocks or not (walk.is_triangle and walk.is_simple):
            continue
        faces = members[r]
        if len(faces) > 1:
            pieces = [region_of(p, m) for p in components(subsurface(m, faces))]
            if len(pieces) != 1 or not pieces[0].is_disk:
                continue
        seen_blocks.add(r)
        chosen.update(faces)
        triangles += 1
    if not chosen:
        return VerifyResult(False, None, tuple(reasons) + ("no triangles",))
    pieces = components(subsurface(m, chosen))
    if len(pieces) != 1:
        reasons.append(f"triangles form {len(pieces)} components")
    piece = pieces[0]
    s = piece.map
    if not s.orientable:
        reasons.append("patch is not orientable")
    origin = sorted(piece.vertex_origin) if len(pieces) == 1 else []
    if len(pieces) == 1 and origin != list(range(m.vertex_count)):
        if len(set(origin)) != len(origin):
            reasons.append("patch is pinched at a vertex")
        else:
            reasons.append(f"patch misses {m.vertex_count - len(origin)} vertices")
    covered = set()
    for f in chosen:
        covered |= m.face_edges[f]
    if covered != kept:
        reasons.append(f"{len(kept ^ covered)} kept edges do not border a triangle")
    walks = tuple(piece.boundary_walks())
    for w in walks:
        if len(set(w)) != len(w):
            reasons.append(f"hole walk {w} is not simple")
    b = len(walks)
    chi = m.vertex_count - len(kept) + triangles
    if not reasons and chi != 2 - b:
        reasons.append(f"chi = {chi} but {b} holes need {2 - b}")
    if reasons:
        return VerifyResult(False, None, tuple(reasons))
    cert = (m.vertex_count, len(kept), triangles, chi, b)
    patch = SpanningPatch(m, kept, frozenset(chosen), walks, 0, b, cert)
    return VerifyResult(True, patch)


# -- disjoint homotopic pairs -------------------------------------------


@dataclass(frozen=True)
class CyclePair:
    """Two disjoint homotopic cycles and the cylinder between them."""
    first: CycleRef
    second: CycleRef
    region: Region
    tried: int


def star_boundaries(m: SurfaceMap, c: CycleRef) -> list[tuple[CycleRef, frozenset]]:
    """For each side of ``c``: the far boundary of the closed star of ``V(c)``
    on that side, with the faces of that star.

    Sides whose star is not a hole-free cylinder, or whose far boundary is
    not a simple cycle of ``m``, are skipped.
    """
    pieces = cut_along(m, c)
    if len(pieces) != 1:
        return []
    piece = pieces[0]
    pm = piece.map
    out = []
    for bface in piece.new_boundaries:
        ring = set(pm.faces[bface].vertices)
        star = set()
        for v in ring:
            k = len(pm.rot_darts[v])
            star.update(pm.corner_face(v, j) for j in range(k))
        star.discard(bface)
        if star & pm.holes:
            continue
        sub = components(subsurface(pm, star))
        if len(sub) != 1:
            continue
        r = region_of(sub[0], pm)
        if not r.is_cylinder:
            continue
        for walk in r.boundary_walks:
            if set(walk) & ring:
                continue
            verts = [piece.vertex_origin[x] for x in walk]
            try:
                d = make_cycle(m, verts)
            except SurfaceMapError:
                break
            faces = frozenset(piece.face_origin[f] for f in star)
            out.append((d, faces))
    return out


def _check_candidate(args):
    m, c, forbidden = args
    for d, faces in star_boundaries(m, c):
        if d.vertex_set & forbidden or d.vertex_set & c.vertex_set:
            continue
        try:
            if not are_homotopic_disjoint(m, c, d):
                continue
        except (CycleContractible, CyclesShareVertex):
            continue
        face = min(faces)
        return c, d, region_containing(m, c, d, face)
    return None


def _exhaustive_pair(m: SurfaceMap, forbidden: frozenset):
    from .topology import classify_cycle
    cycles = [c for c in simple_cycles(m, forbidden) if classify_cycle(m, c) == "nonseparating"]
    tried = 0
    for c, d in itertools.combinations(cycles, 2):
        if c.vertex_set & d.vertex_set:
            continue
        tried += 1
        if are_homotopic_disjoint(m, c, d):
            regions = sorted(_cylinders(m, c, d), key=lambda r: (len(r.faces), min(r.faces)))
            return c, d, regions[0], tried
    return None, None, None, tried


def _cylinders(m, c, d):
    from .topology import cylinders_between
    return cylinders_between(m, c, d)


def simple_cycles(m: SurfaceMap, forbidden=(), max_length=None):
    """All simple cycles (length >= 3) avoiding ``forbidden``, canonical form,
    sorted by (length, vertex sequence).  Exponential; small maps only."""
    forbidden = set(forbidden)
    limit = max_length or m.vertex_count
    found = set()
    for s in range(m.vertex_count):
        if s in forbidden:
            continue
        path = [s]
        on = {s}

        def extend(v):
            for w in m.rotations[v]:
                if w == s and len(path) >= 3:
                    found.add(CycleRef(tuple(path)).canonical())
                elif w > s and w not in on and w not in forbidden and len(path) < limit:
                    path.append(w)
                    on.add(w)
                    extend(w)
                    path.pop()
                    on.discard(w)

        extend(s)
    return [CycleRef(t) for t in sorted(found, key=lambda t: (len(t), t))]


EXHAUSTIVE_LIMIT = 12


def find_disjoint_homotopic_pair(m: SurfaceMap, forbidden=(), retries: int = 64,
                                 workers: int = 1, stage: int | None = None) -> CyclePair:
    """Two vertex-disjoint homotopic nonseparating cycles avoiding ``forbidden``.

    Candidates are nonseparating cycles in order of (length, vertex
    sequence).  For each, the far boundary of its closed star on either
    side is tried as the partner.  After ``retries`` candidates, maps with
    at most 12 vertices fall back to trying every disjoint pair of simple
    cycles.
    """
    forbidden = frozenset(forbidden)
    cands = candidate_cycles(m, ("nonseparating",), forbidden)[:retries]
    jobs = [(m, c, forbidden) for c in cands]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_check_candidate, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_check_candidate(job))
            if results[-1] is not None:
                break
    for i, res in enumerate(results):
        if res is not None:
            return CyclePair(*res, tried=i + 1)
    tried = len(cands)
    if m.vertex_count - len(forbidden) <= EXHAUSTIVE_LIMIT:
        c, d, r, extra = _exhaustive_pair(m, forbidden)
        tried += extra
        if c is not None:
            return CyclePair(c, d, r, tried)
        raise NotFound(f"no disjoint homotopic pair (exhaustive, {tried} candidates)",
                       tried=tried, stage=stage, exhaustive=True)
    raise NotFound(f"no disjoint homotopic pair among {tried} candidates",
                   tried=tried, stage=stage, exhaustive=False)


# -- growing and shrinking the strip -------------------------------------


def _reroute(cycle: CycleRef, x: int, y: int, z: int) -> CycleRef:
    vs = list(cycle.vertices)
    n = len(vs)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if {a, b} == {x, y}:
            return CycleRef(tuple(vs[:i + 1] + [z] + vs[i + 1:]))
    raise NotACycle(f"{x}-{y} is not an edge of {cycle}")


def _closure(m: SurfaceMap, faces) -> set:
    out = set()
    for f in faces:
        out.update(m.faces[f].vertices)
    return out


def _apex(m: SurfaceMap, f: int, x: int, y: int) -> int:
    (z,) = set(m.faces[f].vertices) - {x, y}
    return z


def _torus_check(m: SurfaceMap):
    if m.holes:
        raise MapHasHoles("expected a closed map")
    eg, orientable = euler_genus(m)
    if eg != 2 or not orientable:
        raise NotATorus(f"Euler genus {eg}, orientable={orientable}")
    if not validate_triangulation(m).ok:
        raise NotATriangulation("some face is not a triangle")


@dataclass(frozen=True)
class StripResult:
    first: CycleRef
    second: CycleRef
    region: Region
    steps: int

    def __iter__(self):
        return iter((self.first, self.second, self.region))


def _strip(m, c1, c2, region):
    if region is None:
        regions = [r for r in _cylinders(m, c1, c2)]
        if not regions:
            raise CycleContractible("cycles do not bound a cylinder")
        region = min(regions, key=lambda r: (len(r.faces), min(r.faces)))
    return region


def expand_cylinder(m: SurfaceMap, c1: CycleRef, c2: CycleRef, region: Region | None = None) -> StripResult:
    """Grow the closed strip between ``c1`` and ``c2`` until it meets every vertex.

    A move takes a face outside the strip on an edge ``xy`` of a cycle whose
    third vertex ``z`` is new, adds it, and routes that cycle through ``z``.
    Faces are scanned in id order.  Without ``region`` the strip with fewer
    faces is grown.
    """
    _torus_check(m)
    region = _strip(m, c1, c2, region)
    faces = set(region.faces)
    closure = _closure(m, faces) | c1.vertex_set | c2.vertex_set
    cycles = [c1, c2]
    steps = 0
    while len(closure) < m.vertex_count:
        move = None
        for f in range(m.face_count):
            if f in faces:
                continue
            for x, y in itertools.combinations(m.faces[f].vertices, 2):
                for i, c in enumerate(cycles):
                    if edge_key(x, y) in c.edges:
                        z = _apex(m, f, x, y)
                        if z not in closure:
                            move = (f, i, x, y, z)
                            break
                if move:
                    break
            if move:
                break
        if move is None:
            raise NoExpansionMove(f"{m.vertex_count - len(closure)} vertices uncovered after {steps} moves")
        f, i, x, y, z = move
        cycles[i] = _reroute(cycles[i], x, y, z)
        faces.add(f)
        closure.add(z)
        steps += 1
    if steps:
        region = region_containing(m, cycles[0], cycles[1], min(faces))
    return StripResult(cycles[0], cycles[1], region, steps)


def shrink_cylinder(m: SurfaceMap, c: CycleRef, cp: CycleRef, region: Region | None = None,
                    face: int | None = None) -> StripResult:
    """Push ``c`` and ``cp`` into the open strip between them until no vertex
    is left inside.

    The strip is ``region``, or the component holding ``face``, or else the
    smaller of the two sides.  A move drops a strip face on a cycle edge
    ``xy`` whose third vertex lies strictly inside, rerouting through it.
    """
    if region is None and face is not None:
        region = region_containing(m, c, cp, face)
    region = _strip(m, c, cp, region)
    if not region.is_cylinder:
        raise CycleContractible("region is not a cylinder")
    faces = set(region.faces)
    cycles = [c, cp]
    inside = set(region.interior_vertices)
    steps = 0
    while inside:
        move = None
        for f in sorted(faces):
            for x, y in itertools.combinations(m.faces[f].vertices, 2):
                for i, cyc in enumerate(cycles):
                    if edge_key(x, y) in cyc.edges:
                        z = _apex(m, f, x, y)
                        if z in inside:
                            move = (f, i, x, y, z)
                            break
                if move:
                    break
            if move:
                break
        if move is None:
            raise NoShrinkMove(f"{len(inside)} vertices inside after {steps} moves")
        f, i, x, y, z = move
        cycles[i] = _reroute(cycles[i], x, y, z)
        faces.discard(f)
        inside.discard(z)
        steps += 1
    if steps:
        region = region_containing(m, cycles[0], cycles[1], min(faces))
    return StripResult(cycles[0], cycles[1], region, steps)


# -- finders -------------------------------------------------------------


def _patch_or_raise(m: SurfaceMap, kept, expected_b: int) -> SpanningPatch:
    res = verify_spanning_patch(m, kept)
    if not res.accepted:
        raise VerifierRejected("; ".join(res.reasons))
    if res.patch.hole_count != expected_b:
        raise VerifierRejected(f"expected {expected_b} holes, got {res.patch.hole_count}")
    return res.patch


def find_spanning_cylinder_torus(m: SurfaceMap, retries: int = 64, workers: int = 1) -> SpanningPatch:
    _torus_check(m)
    pair = find_disjoint_homotopic_pair(m, (), retries=retries, workers=workers)
    # grow the side away from the star strip: greedy growth of the thin
    # strip itself can stall with every candidate apex already on a cycle
    sides = _cylinders(m, pair.first, pair.second)
    start = max(sides, key=lambda r: (len(r.closure_vertices), -min(r.faces)))
    grown = expand_cylinder(m, pair.first, pair.second, start)
    kept = set()
    for f in grown.region.faces:
        kept |= m.face_edges[f]
    return _patch_or_raise(m, kept, 2)


def find_spanning_sphere_general(m: SurfaceMap, retries: int = 64, workers: int = 1) -> SpanningPatch:
    """Cut ``h`` vertex-free cylinders out of an orientable genus-``h`` map."""
    if m.holes:
        raise MapHasHoles("expected a closed map")
    if not validate_triangulation(m).ok:
        raise NotATriangulation("some face is not a triangle")
    eg, orientable = euler_genus(m)
    if not orientable or eg < 2:
        raise NotFound(f"needs an orientable surface of positive genus (Euler genus {eg})",
                       tried=0, stage=0, exhaustive=False)
    if eg == 2:
        return find_spanning_cylinder_torus(m, retries=retries, workers=workers)
    excluded: set[int] = set()
    used: set[int] = set()
    for stage in range(1, eg // 2 + 1):
        keep_faces = [f for f in range(m.face_count) if f not in excluded]
        sub = subsurface(m, keep_faces)
        if sorted(sub.vertex_origin) != list(range(m.vertex_count)):
            raise VerifierRejected(f"stage {stage}: excised strips pinch the surface")
        cur = relabel(sub.map, sub.vertex_origin)
        pair = find_disjoint_homotopic_pair(cur, used, retries=retries, workers=workers,
                                            stage=stage)
        strip = shrink_cylinder(cur, pair.first, pair.second, pair.region)
        fmap = _face_map(sub, cur)
        excluded |= {fmap[f] for f in strip.region.faces}
        used |= strip.first.vertex_set | strip.second.vertex_set
    kept = set()
    for f in range(m.face_count):
        if f not in excluded:
            kept |= m.face_edges[f]
    return _patch_or_raise(m, kept, eg)


def _face_map(sub, cur: SurfaceMap) -> dict:
    """Face ids of ``cur`` (``sub.map`` renamed to host vertices) -> host face ids."""
    before = sub.map
    perm = sub.vertex_origin
    table = {}
    for f in range(before.face_count):
        st = before.faces[f].states[0]
        u, v = before.darts[st >> 1]
        g = cur.face_of_state[2 * cur.dart_index[(perm[u], perm[v])] + (st & 1)]
        table[g] = sub.face_origin[f]
    return table
