"""Singular vertical distance on a refinable lattice graph.

Nodes are the admissible points of a half-cell-offset lattice over the
domain; edge weights are the singular variation of the field restricted to
the straight edge segment.  One-to-all distance maps are exact nonnegative
shortest paths, zero-distance equivalence classes come from the subgraph of
(numerically) zero-weight edges, and minimal singularity is decided by
whether one class covers almost every admissible node.

The distance between two nodes is always evaluated from the smaller node
index, which makes symmetry exact by construction even when path sums
would round differently in opposite orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Sequence

from . import bv1d
from .bvfield import (
    StructuredBVField,
    _min_wall_distance,
    is_admissible_node,
    singular_weight,
)
from .chains import Point, PolygonalChain, validate_chain
from .errors import ChainRejected, ContractError, InternalInvariantError

ZERO_TOL = 1e-12  # weights are exact sums of |h| and Cantor differences
COVERAGE_TOL = 0.01

_OFFSETS = {
    4: ((1, 0), (0, 1)),
    8: ((1, 0), (0, 1), (1, 1), (1, -1)),
    16: ((1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)),
}


@dataclass(frozen=True)
class SvdGraph:
    """Admissible-node lattice graph with singular-variation edge weights."""

    field: StructuredBVField
    resolution: float
    connectivity: int
    nodes: tuple[Point, ...]
    lattice: tuple[tuple[int, int], ...]  # integer lattice coordinates per node
    adjacency: tuple[tuple[tuple[int, float], ...], ...]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def edges(self) -> list[tuple[int, int, float]]:
        out = []
        for u, nbrs in enumerate(self.adjacency):
            for v, w in nbrs:
                if u < v:
                    out.append((u, v, w))
        return out

    def nearest_node(self, p: Point) -> int:
        best, best_d = -1, math.inf
        for idx, q in enumerate(self.nodes):
            d = (q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2
            if d < best_d:
                best, best_d = idx, d
        if best < 0:
            raise ContractError("graph has no nodes")
        return best


@dataclass(frozen=True)
class SvdMap:
    """One-to-all distances from a source node, with predecessor links."""

    graph: SvdGraph
    source: int
    dist: tuple[float, ...]
    pred: tuple[int, ...]  # -1 at the source and at unreachable nodes

    def path_nodes(self, target: int) -> list[int]:
        if math.isinf(self.dist[target]):
            return []
        path = [target]
        while path[-1] != self.source:
            path.append(self.pred[path[-1]])
        path.reverse()
        return path

    def rows(self) -> list[tuple[float, float, float]]:
        return [
            (self.graph.nodes[i][0], self.graph.nodes[i][1], self.dist[i])
            for i in range(len(self.dist))
        ]


def build_graph(
    F: StructuredBVField, resolution: float, connectivity: int = 8
) -> SvdGraph:
    """Deterministic lattice graph at the given cell size.

    Nodes sit half a cell off the scenario coordinates so walls generically
    avoid them; edges with degenerate wall contact are omitted.
    """
    if resolution <= 0:
        raise ContractError("resolution must be positive")
    if connectivity not in _OFFSETS:
        raise ContractError(f"connectivity must be one of {sorted(_OFFSETS)}")
    bx0, by0, bx1, by1 = F.domain.bbox
    nx = max(1, int(math.floor((bx1 - bx0) / resolution + 1e-9)))
    ny = max(1, int(math.floor((by1 - by0) / resolution + 1e-9)))
    offset = _generic_offset(F, resolution, nx, ny)
    nodes: list[Point] = []
    lattice: list[tuple[int, int]] = []
    index: dict[tuple[int, int], int] = {}
    for j in range(ny):
        for i in range(nx):
            p = (bx0 + (i + offset) * resolution, by0 + (j + offset) * resolution)
            if is_admissible_node(F, p):
                index[(i, j)] = len(nodes)
                nodes.append(p)
                lattice.append((i, j))
    if not nodes:
        raise ContractError("no admissible lattice nodes at this resolution")
    adj: list[list[tuple[int, float]]] = [[] for _ in nodes]
    for u, (i, j) in enumerate(lattice):
        for di, dj in _OFFSETS[connectivity]:
            v = index.get((i + di, j + dj))
            if v is None:
                continue
            if not F.domain.is_rect and not F.domain.contains_segment(
                nodes[u], nodes[v]
            ):
                continue
            try:
                w = singular_weight(F, nodes[u], nodes[v])
            except ChainRejected:
                continue  # degenerate segment: the edge is simply absent
            adj[u].append((v, w))
            adj[v].append((u, w))
    return SvdGraph(
        F,
        resolution,
        connectivity,
        tuple(nodes),
        tuple(lattice),
        tuple(tuple(sorted(nbrs)) for nbrs in adj),
    )


def _generic_offset(F: StructuredBVField, resolution: float, nx: int, ny: int) -> float:
    """Sub-cell lattice offset putting every node clear of the walls.

    The half-cell default already avoids walls on scenario coordinates;
    when wall geometry happens to hit it exactly, the offset is bumped by
    deterministic 1/64-cell steps until all in-domain lattice points have
    wall clearance."""
    if not F.walls:
        return 0.5
    bx0, by0, _, _ = F.domain.bbox
    clearance = 4.0 * F.node_tol
    for bump in range(20):
        offset = 0.5 + bump / 64.0
        clean = True
        for j in range(ny):
            for i in range(nx):
                p = (bx0 + (i + offset) * resolution, by0 + (j + offset) * resolution)
                if not F.domain.contains(p):
                    continue
                if _min_wall_distance(p, F.walls) <= clearance:
                    clean = False
                    break
            if not clean:
                break
        if clean:
            return offset
    return 0.5  # pathological geometry: fall back, collisions become non-nodes


def svd_map(G: SvdGraph, source: int) -> SvdMap:
    """Exact nonnegative-weight shortest-path map (Dijkstra) from `source`."""
    if not 0 <= source < G.node_count:
        raise ContractError(f"source {source} not a graph node")
    dist = [math.inf] * G.node_count
    pred = [-1] * G.node_count
    dist[source] = 0.0
    heap: list[tuple[float, int]] = [(0.0, source)]
    done = [False] * G.node_count
    while heap:
        d, u = heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in G.adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heappush(heap, (nd, v))
    return SvdMap(G, source, tuple(dist), tuple(pred))


@dataclass(frozen=True)
class SvdResult:
    distance: float
    node_path: tuple[int, ...]
    chain: PolygonalChain | None  # None when x1 == x2 or the lattice path is not simple
    simple: bool


def svd(G: SvdGraph, x1: int, x2: int) -> SvdResult:
    """Distance between two nodes plus a realizing lattice chain.

    Identical nodes give (0, empty chain); disconnected nodes give +inf and
    no chain.  The evaluation always runs from the smaller index, so
    svd(a, b) and svd(b, a) agree exactly.
    """
    if x1 == x2:
        return SvdResult(0.0, (x1,), None, True)
    a, b = (x1, x2) if x1 < x2 else (x2, x1)
    m = svd_map(G, a)
    d = m.dist[b]
    if math.isinf(d):
        return SvdResult(math.inf, (), None, False)
    path = m.path_nodes(b)
    if x1 != a:
        path.reverse()
    verts = _merge_collinear([G.nodes[i] for i in path])
    try:
        chain = validate_chain(G.field.domain, verts)
        return SvdResult(d, tuple(path), chain, True)
    except ChainRejected:
        # node-simple tree path whose segments cross geometrically; the
        # distance is still exact, only the chain object is withheld
        return SvdResult(d, tuple(path), None, False)


def _merge_collinear(pts: list[Point]) -> list[Point]:
    """Drop interior lattice points collinear with their neighbours."""
    if len(pts) <= 2:
        return pts
    merged = [pts[0]]
    for i in range(1, len(pts) - 1):
        ax, ay = merged[-1]
        bx, by = pts[i]
        cx, cy = pts[i + 1]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if cross != 0.0:
            merged.append(pts[i])
    merged.append(pts[-1])
    return merged


def zero_classes(G: SvdGraph, ztol: float = ZERO_TOL) -> list[list[int]]:
    """Connected components of the zero-weight subgraph, each a lattice
    surrogate of one equivalence class of the pseudometric.  Sorted by
    decreasing size, ties by smallest node index."""
    parent = list(range(G.node_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, w in G.edges():
        if w <= ztol:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = {}
    for u in range(G.node_count):
        groups.setdefault(find(u), []).append(u)
    classes = sorted(groups.values(), key=lambda c: (-len(c), c[0]))
    return classes


@dataclass(frozen=True)
class MinimalSingularityVerdict:
    minimally_singular: bool
    witness: Point | None  # representative of the dominant class when true
    coverage: float  # fraction of admissible nodes in the largest class
    class_count: int
    node_count: int
    violating_node: Point | None  # a node outside the largest class when false


def is_minimally_singular(
    F: StructuredBVField,
    resolution: float,
    tol: float = COVERAGE_TOL,
    connectivity: int = 8,
    ztol: float = ZERO_TOL,
    graph: SvdGraph | None = None,
) -> MinimalSingularityVerdict:
    """Lattice test of minimal singularity: some zero-distance class must
    cover a fraction >= 1 - tol of the admissible nodes."""
    G = graph if graph is not None else build_graph(F, resolution, connectivity)
    classes = zero_classes(G, ztol)
    largest = classes[0]
    coverage = len(largest) / G.node_count
    if coverage >= 1.0 - tol:
        return MinimalSingularityVerdict(
            True, G.nodes[largest[0]], coverage, len(classes), G.node_count, None
        )
    violating = G.nodes[classes[1][0]] if len(classes) > 1 else None
    return MinimalSingularityVerdict(
        False, G.nodes[largest[0]], coverage, len(classes), G.node_count, violating
    )


def monotone_along_optimal(M: SvdMap) -> bool:
    """Structural check: distances never decrease along predecessor paths.

    Exact for nonnegative-weight shortest-path trees; False indicates a
    corrupted map."""
    for v in range(len(M.dist)):
        u = M.pred[v]
        if u >= 0 and M.dist[u] > M.dist[v]:
            return False
    return True


def triangle_check(G: SvdGraph, triples: Sequence[tuple[int, int, int]]) -> float:
    """Smallest slack d(x,y) + d(y,z) - d(x,z) over the given node triples
    (negative values violate the triangle inequality)."""
    worst = math.inf
    maps: dict[int, SvdMap] = {}

    def mp(s: int) -> SvdMap:
        if s not in maps:
            maps[s] = svd_map(G, s)
        return maps[s]

    for x, y, z in triples:
        dxy = mp(x).dist[y]
        dyz = mp(y).dist[z]
        dxz = mp(x).dist[z]
        if math.isinf(dxz):
            continue
        worst = min(worst, dxy + dyz - dxz)
    return worst


# ---------------------------------------------------------------------------
# one-dimensional specialization: the only chain between two parameters of
# an interval is the interval itself


def svd_profile(p: bv1d.BVProfile, t1: float, t2: float) -> float:
    """Singular vertical distance between two parameters of a 1-D profile."""
    if t1 == t2:
        return 0.0
    return bv1d.singular_variation_between(p, t1, t2)


def is_minimally_singular_profile(
    p: bv1d.BVProfile, ztol: float = ZERO_TOL
) -> MinimalSingularityVerdict:
    """1-D test: a profile is minimally singular exactly when it is
    absolutely continuous (no singular variation at all)."""
    sing = bv1d.variation(p, "singular")
    ok = sing <= ztol
    witness = (p.a0, 0.0) if ok else None
    violating = None
    if not ok:
        # first singular feature to the right of the left endpoint
        t = min(
            [t for t, _ in p.jumps] + [a.s0 for a in p.cantor_atoms],
            default=p.am,
        )
        violating = (t, 0.0)
    return MinimalSingularityVerdict(ok, witness, 1.0 if ok else 0.0, 1 if ok else 2, 0, violating)
