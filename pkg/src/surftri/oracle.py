"""Exhaustive search for spanning spheres-with-holes made of host faces.

If a spanning subgraph triangulates a sphere with holes, each of its
triangles is a face of the host, so it suffices to search over face
subsets ``S``.  The search decides faces one at a time (breadth-first face
order, "take" before "skip") and prunes with two local facts:

* at every vertex the corners taken must form one nonempty cyclic arc, or
  all corners (the vertex is then interior);
* a genus-0 patch with ``b`` holes on ``V`` vertices satisfies
  ``F + l = 2V - 4 + 2b`` where ``l`` counts boundary vertices.

Leaves are checked for connectivity, the number of boundary circles, and
against host faces that would close up inside the patch, then certified by
:func:`surftri.spanner.verify_spanning_patch`.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

from .errors import BudgetExceeded, MapHasHoles, NotATriangulation, NotFound
from .mapcore import SurfaceMap, validate_triangulation
from .spanner import SpanningPatch, verify_spanning_patch

DEFAULT_BUDGET = 10 ** 8


@lru_cache(maxsize=None)
def arc_feasible(k: int, inside: int, outside: int) -> bool:
    """Can the corners ``inside`` grow to a full ring or a nonempty cyclic
    arc avoiding ``outside``?  Masks are over ``k`` corners."""
    full = (1 << k) - 1
    if not outside:
        return True
    if outside == full:
        return False
    if not inside:
        return True
    # walk the maximal runs of non-outside corners; ``inside`` must sit in one
    start = next(j for j in range(k) if outside >> j & 1)
    runs_hit = 0
    in_run = False
    hit = False
    for t in range(1, k + 1):
        j = (start + t) % k
        if outside >> j & 1:
            if in_run and hit:
                runs_hit += 1
            in_run = False
            hit = False
        else:
            in_run = True
            hit = hit or bool(inside >> j & 1)
    return runs_hit == 1


def _bfs_faces(m: SurfaceMap) -> list[int]:
    order, seen = [0], {0}
    queue = deque([0])
    while queue:
        f = queue.popleft()
        for st in m.faces[f].states:
            g = m.face_of_state[st ^ 1]
            if g not in seen:
                seen.add(g)
                order.append(g)
                queue.append(g)
    order += [f for f in range(m.face_count) if f not in seen]
    return order


class _Search:
    def __init__(self, m: SurfaceMap, b: int, budget: int):
        self.m = m
        self.b = b
        self.budget = budget
        self.nodes = 0
        n = m.vertex_count
        self.order = _bfs_faces(m)
        self.deg = [len(r) for r in m.rotations]
        self.full = [(1 << k) - 1 for k in self.deg]
        corners = [[] for _ in range(m.face_count)]
        for v in range(n):
            for j in range(self.deg[v]):
                corners[m.corner_face(v, j)].append((v, 1 << j))
        self.corners = corners
        self.inside = [0] * n
        self.outside = [0] * n
        self.target = 2 * n - 4 + 2 * b
        self.taken = 0
        self.boundary = 0        # vertices with some corner skipped
        self.closed = 0          # vertices with every corner taken
        self.chosen: list[bool] = [False] * m.face_count

    # a vertex with a skipped corner is on the boundary; with all taken, interior
    def _set(self, f: int, take: bool) -> bool:
        ok = True
        for v, bit in self.corners[f]:
            if take:
                self.inside[v] |= bit
                if self.inside[v] == self.full[v]:
                    self.closed += 1
            else:
                if not self.outside[v]:
                    self.boundary += 1
                self.outside[v] |= bit
            if not arc_feasible(self.deg[v], self.inside[v], self.outside[v]):
                ok = False
        return ok

    def _unset(self, f: int, take: bool):
        for v, bit in self.corners[f]:
            if take:
                if self.inside[v] == self.full[v]:
                    self.closed -= 1
                self.inside[v] &= ~bit
            else:
                self.outside[v] &= ~bit
                if not self.outside[v]:
                    self.boundary -= 1

    def _bounds_ok(self, depth: int) -> bool:
        left = len(self.order) - depth
        n = self.m.vertex_count
        if self.taken + self.boundary > self.target:
            return False
        return self.taken + left + (n - self.closed) >= self.target

    def run(self, depth: int = 0, prefix=()):
        """DFS; returns the face set of the first accepted patch or ``None``."""
        if prefix:
            for take in prefix:
                f = self.order[depth]
                self.chosen[f] = take
                self.taken += take
                if not self._set(f, take):
                    return None
                depth += 1
            if not self._bounds_ok(depth):
                return None
        return self._dfs(depth)

    def _dfs(self, depth: int):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"node budget {self.budget} exhausted", nodes=self.nodes)
        if depth == len(self.order):
            return self._leaf()
        f = self.order[depth]
        for take in (True, False):
            self.chosen[f] = take
            self.taken += take
            if self._set(f, take) and self._bounds_ok(depth + 1):
                found = self._dfs(depth + 1)
                if found is not None:
                    return found
            self._unset(f, take)
            self.taken -= take
            self.chosen[f] = False
        return None

    def _leaf(self):
        m = self.m
        if self.taken + self.boundary != self.target:
            return None
        faces = [f for f in range(m.face_count) if self.chosen[f]]
        if not faces:
            return None
        S = set(faces)
        # connectivity across shared edges
        seen = {faces[0]}
        queue = deque([faces[0]])
        while queue:
            f = queue.popleft()
            for st in m.faces[f].states:
                g = m.face_of_state[st ^ 1]
                if g in S and g not in seen:
                    seen.add(g)
                    queue.append(g)
        if len(seen) != len(S):
            return None
        kept = set()
        for f in faces:
            kept |= m.face_edges[f]
        for f in range(m.face_count):
            if f not in S and m.face_edges[f] <= kept:
                return None
        # boundary circles
        bd = [e for e in kept if sum(g in S for g in m.edge_faces(*e)) == 1]
        adj: dict[int, list[int]] = {}
        for u, v in bd:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        circles = 0
        seen_v: set[int] = set()
        for s in adj:
            if s in seen_v:
                continue
            circles += 1
            stack = [s]
            seen_v.add(s)
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen_v:
                        seen_v.add(y)
                        stack.append(y)
        if circles != self.b:
            return None
        res = verify_spanning_patch(m, kept)
        if res.accepted and res.patch.hole_count == self.b:
            return res.patch
        return None


def _run_prefix(args):
    m, b, budget, prefix = args
    s = _Search(m, b, budget)
    try:
        return s.run(0, prefix), s.nodes, False
    except BudgetExceeded:
        return None, s.nodes, True


def face_subset_oracle(m: SurfaceMap, target_holes: int, budget: int = DEFAULT_BUDGET,
                       workers: int = 1, split_depth: int = 4) -> SpanningPatch:
    """First spanning genus-0 patch with ``target_holes`` holes, in search order.

    Raises :class:`NotFound` (``exhaustive=True``) when the full search space
    is refuted and :class:`BudgetExceeded` when it is not finished.  With
    ``workers > 1`` the first ``split_depth`` decisions are fanned out, each
    branch with its own budget; the earliest branch with a patch wins, so
    the answer does not depend on ``workers``.
    """
    if m.holes:
        raise MapHasHoles("oracle needs a closed map")
    if not validate_triangulation(m).ok:
        raise NotATriangulation("oracle needs a triangulation")
    if target_holes < 0:
        raise ValueError("target_holes must be >= 0")
    if workers <= 1:
        s = _Search(m, target_holes, budget)
        found = s.run()
        if found is None:
            raise NotFound(f"no spanning patch with {target_holes} holes ({s.nodes} nodes)",
                           tried=s.nodes, stage=None, exhaustive=True)
        return found
    depth = min(split_depth, m.face_count)
    prefixes = [tuple(not (i >> (depth - 1 - t)) & 1 for t in range(depth)) for i in range(2 ** depth)]
    jobs = [(m, target_holes, budget, p) for p in prefixes]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_run_prefix, jobs))
    nodes = sum(r[1] for r in results)
    for found, _, truncated in results:
        if truncated:
            raise BudgetExceeded(f"node budget {budget} exhausted in a branch", nodes=nodes)
        if found is not None:
            return found
    raise NotFound(f"no spanning patch with {target_holes} holes ({nodes} nodes)",
                   tried=nodes, stage=None, exhaustive=True)
