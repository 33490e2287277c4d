"""Steiner symmetrization layer.

A nonnegative field v describes the section lengths of a set in 3-space
whose vertical slice over x is an interval; a second field b places the
interval's midpoint.  b == 0 gives the Steiner symmetric set.  The relative
perimeter over a box splits into the graph area of the top and bottom
surfaces (absolutely continuous part), the vertical area over jump walls
(interval symmetric differences of the one-sided sections), and the
vertical area over Cantor channels (weighted Cantor-measure integrals),
assembled so the symmetric set minimizes each term pointwise.

Rigidity of that minimization on a domain reduces to minimal singularity of
v; when it fails and v is pure-jump, an explicit flat counterexample b is
constructed from the zero-class structure of the distance map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .bvfield import (
    CantorChannel,
    JumpWall,
    SmoothGrid,
    StructuredBVField,
    _min_wall_distance,
    eval_lower,
)
from .cantor import cantor_affine_integral, cantor_eval
from .chains import Domain, Point, on_segment, orient
from .errors import ContractError, PreconditionError
from .svd import (
    MinimalSingularityVerdict,
    SvdGraph,
    build_graph,
    is_minimally_singular,
    svd_map,
    zero_classes,
)

POSITIVITY_TOL = 1e-12
JUMP_BOUND_TOL = 1e-12


@dataclass(frozen=True)
class VDistributedSet:
    """Set with segment sections: over x the slice is the interval
    (b(x) - v(x)/2, b(x) + v(x)/2), empty where v vanishes."""

    v: StructuredBVField
    b: StructuredBVField

    @property
    def domain(self) -> Domain:
        return self.v.domain


def steiner_set(v: StructuredBVField, probes: int = 7) -> VDistributedSet:
    """The Steiner symmetric set of any v-distributed set: barycenter 0."""
    _check_nonnegative(v, probes)
    zero = StructuredBVField.build(v.domain, smooth=0.0)
    return VDistributedSet(v, zero)


def _check_nonnegative(v: StructuredBVField, probes: int = 7) -> None:
    bx0, by0, bx1, by1 = v.domain.bbox
    for i in range(probes):
        for j in range(probes):
            p = (
                bx0 + (i + 0.5) * (bx1 - bx0) / probes,
                by0 + (j + 0.5) * (by1 - by0) / probes,
            )
            if not v.domain.contains(p):
                continue
            if _min_wall_distance(p, v.walls) <= v.node_tol:
                continue
            if eval_lower(v, p) < -1e-12:
                raise ContractError(f"negative section length at {p}")


# ---------------------------------------------------------------------------
# traces


def _side_trace(F: StructuredBVField, x: Point, normal: Point) -> float:
    """One-sided limit of the field at a wall point, approached from the
    side `normal` points into.  The smooth and Cantor parts are continuous
    (evaluated at x); the wall potential is sampled just off the wall."""
    features = [1.0]
    for p, q, _ in F.wall_segments():
        for vtx in (p, q):
            d = math.hypot(vtx[0] - x[0], vtx[1] - x[1])
            if d > F.node_tol:
                features.append(d)
    delta = 0.4 * min(features)
    probe = (x[0] + delta * normal[0], x[1] + delta * normal[1])
    for _ in range(30):
        if _min_wall_distance(probe, F.walls) > F.node_tol:
            break
        delta *= 0.5
        probe = (x[0] + delta * normal[0], x[1] + delta * normal[1])
    smooth_part = F.smooth.value(x) + sum(ch.value(x, F.depth) for ch in F.channels)
    return smooth_part + F._anchor_wall_sum(probe)


def _section(v_val: float, b_val: float) -> tuple[float, float] | None:
    if v_val <= 0.0:
        return None
    return (b_val - 0.5 * v_val, b_val + 0.5 * v_val)


def _symmetric_difference(
    s1: tuple[float, float] | None, s2: tuple[float, float] | None
) -> float:
    """H^1 measure of the symmetric difference of two intervals."""
    l1 = 0.0 if s1 is None else s1[1] - s1[0]
    l2 = 0.0 if s2 is None else s2[1] - s2[0]
    if s1 is None or s2 is None:
        return l1 + l2
    overlap = max(0.0, min(s1[1], s2[1]) - max(s1[0], s2[0]))
    return l1 + l2 - 2.0 * overlap


# ---------------------------------------------------------------------------
# perimeter


@dataclass(frozen=True)
class PerimeterReport:
    total: float
    ac: float
    jump: float
    cantor: float
    box: tuple[float, float, float, float]
    closed: bool

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "ac_graph_area": self.ac,
            "jump_vertical": self.jump,
            "cantor_vertical": self.cantor,
            "box": list(self.box),
            "closed": self.closed,
        }


_G1 = 0.5 * (1.0 - 1.0 / math.sqrt(3.0))
_G2 = 0.5 * (1.0 + 1.0 / math.sqrt(3.0))


def perimeter(
    E: VDistributedSet,
    box: tuple[float, float, float, float] | None = None,
    closed: bool = False,
) -> PerimeterReport:
    """Relative perimeter of the set over box x R.

    Open boxes exclude wall pieces lying on the box boundary (relative
    perimeter semantics); closed boxes include them, which is how the full
    surface area of a bounded set is obtained.
    """
    v, b = E.v, E.b
    if box is None:
        box = v.domain.bbox
    x0, y0, x1, y1 = box
    bx0, by0, bx1, by1 = v.domain.bbox
    if x0 < bx0 - 1e-12 or y0 < by0 - 1e-12 or x1 > bx1 + 1e-12 or y1 > by1 + 1e-12:
        raise ContractError("box must lie inside the domain bounding box")

    ac = _ac_graph_area(E, box)
    jump = _jump_vertical(E, box, closed)
    cantor = _cantor_vertical(E, box)
    return PerimeterReport(ac + jump + cantor, ac, jump, cantor, box, closed)


def _mesh_lines(E: VDistributedSet, lo: float, hi: float, axis: int) -> list[float]:
    cuts = {lo, hi}
    for grid in (E.v.smooth, E.b.smooth):
        xs, ys = grid.grid_lines()
        for g in xs if axis == 0 else ys:
            if lo < g < hi:
                cuts.add(g)
    return sorted(cuts)


def _ac_graph_area(E: VDistributedSet, box) -> float:
    x0, y0, x1, y1 = box
    if x1 <= x0 or y1 <= y0:
        return 0.0
    v, b = E.v, E.b
    xcuts = _mesh_lines(E, x0, x1, 0)
    ycuts = _mesh_lines(E, y0, y1, 1)
    total = 0.0
    for ax, bx in zip(xcuts, xcuts[1:]):
        for ay, by in zip(ycuts, ycuts[1:]):
            w, h = bx - ax, by - ay
            if w <= 0 or h <= 0:
                continue
            cell = 0.0
            for fx in (_G1, _G2):
                for fy in (_G1, _G2):
                    p = (ax + fx * w, ay + fy * h)
                    if not v.domain.contains(p):
                        continue
                    if eval_lower(v, p) <= 0.0:
                        continue
                    gv = v.smooth.gradient(p)
                    gb = b.smooth.gradient(p)
                    top = (gb[0] + 0.5 * gv[0], gb[1] + 0.5 * gv[1])
                    bot = (gb[0] - 0.5 * gv[0], gb[1] - 0.5 * gv[1])
                    cell += math.sqrt(1.0 + top[0] ** 2 + top[1] ** 2)
                    cell += math.sqrt(1.0 + bot[0] ** 2 + bot[1] ** 2)
            total += cell * 0.25 * w * h
    return total


def _collect_interfaces(E: VDistributedSet) -> list[tuple[Point, Point]]:
    """Union of the wall geometries of v and b, split at every endpoint of
    a collinear overlapping partner and deduplicated."""
    raw = [(p, q) for p, q, _ in E.v.wall_segments()]
    raw += [(p, q) for p, q, _ in E.b.wall_segments()]
    pieces: list[tuple[Point, Point]] = []
    for p, q in raw:
        cuts = {0.0, 1.0}
        L2 = (q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2
        for r, s in raw:
            for vtx in (r, s):
                if on_segment(vtx, p, q):
                    t = ((vtx[0] - p[0]) * (q[0] - p[0]) + (vtx[1] - p[1]) * (q[1] - p[1])) / L2
                    if 1e-12 < t < 1.0 - 1e-12:
                        cuts.add(t)
        ts = sorted(cuts)
        for t0, t1 in zip(ts, ts[1:]):
            a = (p[0] + t0 * (q[0] - p[0]), p[1] + t0 * (q[1] - p[1]))
            c = (p[0] + t1 * (q[0] - p[0]), p[1] + t1 * (q[1] - p[1]))
            pieces.append((a, c))
    seen = set()
    unique = []
    for a, c in pieces:
        key = tuple(sorted((tuple(round(z, 12) for z in a), tuple(round(z, 12) for z in c))))
        if key not in seen:
            seen.add(key)
            unique.append((a, c))
    return unique


def _clip_to_box(a: Point, c: Point, box, closed: bool):
    """Clip segment to the box; None when nothing (or, for an open box,
    only boundary contact) remains."""
    x0, y0, x1, y1 = box
    t0, t1 = 0.0, 1.0
    dx, dy = c[0] - a[0], c[1] - a[1]
    for p0, d, lo, hi in ((a[0], dx, x0, x1), (a[1], dy, y0, y1)):
        if d == 0.0:
            if p0 < lo - 1e-12 or p0 > hi + 1e-12:
                return None
            continue
        ta, tb = (lo - p0) / d, (hi - p0) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
    if t1 <= t0 + 1e-12:
        return None
    pa = (a[0] + t0 * dx, a[1] + t0 * dy)
    pc = (a[0] + t1 * dx, a[1] + t1 * dy)
    if not closed:
        # drop pieces lying on the box boundary itself
        for lo, hi, coord in ((x0, x1, 0), (y0, y1, 1)):
            if abs(pa[coord] - lo) < 1e-12 and abs(pc[coord] - lo) < 1e-12:
                return None
            if abs(pa[coord] - hi) < 1e-12 and abs(pc[coord] - hi) < 1e-12:
                return None
    return pa, pc


def _jump_vertical(E: VDistributedSet, box, closed: bool) -> float:
    v, b = E.v, E.b
    total = 0.0
    for a, c in _collect_interfaces(E):
        clipped = _clip_to_box(a, c, box, closed)
        if clipped is None:
            continue
        pa, pc = clipped
        seg_len = math.hypot(pc[0] - pa[0], pc[1] - pa[1])
        if seg_len == 0.0:
            continue
        d = ((pc[0] - pa[0]) / seg_len, (pc[1] - pa[1]) / seg_len)
        n_right = (d[1], -d[0])
        n_left = (-d[1], d[0])
        # split at smooth-lattice lines so traces vary affinely per chunk
        cuts = {0.0, seg_len}
        for grid in (v.smooth, b.smooth):
            xs, ys = grid.grid_lines()
            if d[0] != 0.0:
                for g in xs:
                    t = (g - pa[0]) / d[0]
                    if 1e-12 < t < seg_len - 1e-12:
                        cuts.add(t)
            if d[1] != 0.0:
                for g in ys:
                    t = (g - pa[1]) / d[1]
                    if 1e-12 < t < seg_len - 1e-12:
                        cuts.add(t)
        ts = sorted(cuts)
        for t0, t1 in zip(ts, ts[1:]):
            h = t1 - t0
            if h <= 0:
                continue
            chunk = 0.0
            for f in (_G1, _G2):
                t = t0 + f * h
                x = (pa[0] + t * d[0], pa[1] + t * d[1])
                v_r = _side_trace(v, x, n_right)
                v_l = _side_trace(v, x, n_left)
                b_r = _side_trace(b, x, n_right)
                b_l = _side_trace(b, x, n_left)
                chunk += _symmetric_difference(
                    _section(v_r, b_r), _section(v_l, b_l)
                )
            total += chunk * 0.5 * h
    return total


def _canonical_channel(ch: CantorChannel) -> tuple[tuple[float, float], tuple[float, float], float, float]:
    """Orientation-independent fiber key plus the weight and its sign flip.

    Reversing the direction maps the staircase to its mirror and negates
    the effective weight; the constant offset is irrelevant to the
    singular data."""
    nu, (a, b), w = ch.nu, ch.band, ch.weight
    if nu[0] < 0.0 or (nu[0] == 0.0 and nu[1] < 0.0):
        return ((-nu[0], -nu[1]), (-b, -a), -w, -1.0)
    return (nu, (a, b), w, 1.0)


def _fiber_groups(E: VDistributedSet) -> dict:
    """Joint channel weights per geometric fiber family."""
    groups: dict[tuple, dict[str, float]] = {}
    for which, field_ in (("v", E.v), ("b", E.b)):
        for ch in field_.channels:
            nu, band, w, _ = _canonical_channel(ch)
            key = (round(nu[0], 12), round(nu[1], 12), round(band[0], 12), round(band[1], 12))
            slot = groups.setdefault(key, {"v": 0.0, "b": 0.0, "nu": nu, "band": band})
            slot[which] += w
    return groups


def _chord_length(box, nu: Point, s: float) -> float:
    """Length of the box's intersection with the line x . nu = s."""
    x0, y0, x1, y1 = box
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    # intersect the line with the four box edges
    pts = []
    for a, c in zip(corners, corners[1:] + corners[:1]):
        pa = a[0] * nu[0] + a[1] * nu[1] - s
        pc = c[0] * nu[0] + c[1] * nu[1] - s
        if pa == 0.0:
            pts.append(a)
        if (pa < 0) != (pc < 0):
            t = pa / (pa - pc)
            pts.append((a[0] + t * (c[0] - a[0]), a[1] + t * (c[1] - a[1])))
    if len(pts) < 2:
        return 0.0
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]))
    return best


def _cantor_vertical(E: VDistributedSet, box) -> float:
    x0, y0, x1, y1 = box
    total = 0.0
    for key, slot in sorted(_fiber_groups(E).items()):
        nu, (a, b) = slot["nu"], slot["band"]
        w_top = slot["b"] + 0.5 * slot["v"]
        w_bot = slot["b"] - 0.5 * slot["v"]
        density = abs(w_top) + abs(w_bot)
        if density == 0.0:
            continue
        corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
        projs = sorted(c[0] * nu[0] + c[1] * nu[1] for c in corners)
        lo = max(a, projs[0])
        hi = min(b, projs[-1])
        if hi <= lo:
            continue
        # chord length is piecewise affine between corner projections
        breaks = sorted({lo, hi} | {p for p in projs if lo < p < hi})
        for s0, s1 in zip(breaks, breaks[1:]):
            c0 = _chord_length(box, nu, s0)
            c1 = _chord_length(box, nu, s1)
            # affine in the staircase coordinate ell = (s - a)/(b - a)
            e0 = (s0 - a) / (b - a)
            e1 = (s1 - a) / (b - a)
            if e1 <= e0:
                continue
            slope = (c1 - c0) / (e1 - e0)
            const = c0 - slope * e0
            total += density * cantor_affine_integral(const, slope, e0, e1)
    return total


# ---------------------------------------------------------------------------
# positivity precondition


@dataclass(frozen=True)
class PositivityReport:
    ok: bool
    min_value: float
    witness: Point | None
    probe_count: int


def positivity_report(
    v: StructuredBVField, graph: SvdGraph
) -> PositivityReport:
    """Checks the lower approximate limit of v at every admissible node and
    at midpoints between lattice-adjacent nodes (the latter catch thin zero
    lines between nodes, where positivity must hold codimension-one a.e.)."""
    worst = math.inf
    witness = None
    count = 0
    probes: list[Point] = list(graph.nodes)
    index = {ij: k for k, ij in enumerate(graph.lattice)}
    for (i, j), u in index.items():
        for di, dj in ((1, 0), (0, 1)):
            vtx = index.get((i + di, j + dj))
            if vtx is None:
                continue
            p, q = graph.nodes[u], graph.nodes[vtx]
            probes.append((0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])))
    for p in probes:
        if not v.domain.contains(p):
            continue
        val = eval_lower(v, p)
        count += 1
        if val < worst:
            worst, witness = val, p
    ok = worst > POSITIVITY_TOL
    return PositivityReport(ok, worst, None if ok else witness, count)


# ---------------------------------------------------------------------------
# equality cases


@dataclass(frozen=True)
class EqualityCaseReport:
    sections_are_segments: bool
    gradient_vanishes: bool
    jumps_dominated: bool
    cantor_dominated: bool
    verdict: bool
    perimeter_set: float
    perimeter_symmetric: float
    perimeters_agree: bool

    def conditions(self) -> dict:
        return {
            "sections_are_segments": self.sections_are_segments,
            "gradient_vanishes": self.gradient_vanishes,
            "jumps_dominated": self.jumps_dominated,
            "cantor_dominated": self.cantor_dominated,
        }

    def to_dict(self) -> dict:
        d = self.conditions()
        d.update(
            verdict=self.verdict,
            perimeter_set=self.perimeter_set,
            perimeter_symmetric=self.perimeter_symmetric,
            perimeters_agree=self.perimeters_agree,
        )
        return d


def _gradient_vanishes(b: StructuredBVField, tol: float = 1e-12) -> bool:
    grid = b.smooth
    xs, ys = grid.grid_lines()
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            for fx in (_G1, _G2):
                for fy in (_G1, _G2):
                    p = (
                        xs[i] + fx * (xs[i + 1] - xs[i]),
                        ys[j] + fy * (ys[j + 1] - ys[j]),
                    )
                    g = grid.gradient(p)
                    if abs(g[0]) > tol or abs(g[1]) > tol:
                        return False
    return True


def _segment_covered_with_bound(
    b_seg: tuple[Point, Point, float], v_segments
) -> bool:
    """Every point of the b-wall segment must lie on a collinear v-wall
    segment whose half height dominates the b height."""
    p, q, hb = b_seg
    cuts = {0.0, 1.0}
    L2 = (q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2
    for r, s, _ in v_segments:
        for vtx in (r, s):
            if on_segment(vtx, p, q):
                t = ((vtx[0] - p[0]) * (q[0] - p[0]) + (vtx[1] - p[1]) * (q[1] - p[1])) / L2
                if 1e-12 < t < 1.0 - 1e-12:
                    cuts.add(t)
    ts = sorted(cuts)
    for t0, t1 in zip(ts, ts[1:]):
        mid = (
            p[0] + 0.5 * (t0 + t1) * (q[0] - p[0]),
            p[1] + 0.5 * (t0 + t1) * (q[1] - p[1]),
        )
        a_pt = (p[0] + t0 * (q[0] - p[0]), p[1] + t0 * (q[1] - p[1]))
        c_pt = (p[0] + t1 * (q[0] - p[0]), p[1] + t1 * (q[1] - p[1]))
        ok = False
        for r, s, hv in v_segments:
            if (
                orient(r, s, a_pt) == 0
                and orient(r, s, c_pt) == 0
                and on_segment(mid, r, s)
                and abs(hb) <= 0.5 * abs(hv) + JUMP_BOUND_TOL
            ):
                ok = True
                break
        if not ok:
            return False
    return True


def check_equality_case(
    v: StructuredBVField,
    b: StructuredBVField,
    resolution: float,
    connectivity: int = 8,
    graph: SvdGraph | None = None,
) -> EqualityCaseReport:
    """Per-condition report for membership among the perimeter-equality
    sets: flat barycenter gradient, wall jumps dominated by half the v
    jumps on the same geometry, channel weights dominated by half the v
    weights on the same fibers; cross-checked against direct perimeter
    agreement at 1e-9 relative."""
    G = graph if graph is not None else build_graph(v, resolution, connectivity)
    pos = positivity_report(v, G)
    if not pos.ok:
        raise PreconditionError(
            f"lower limit of v is {pos.min_value} at {pos.witness}; "
            "positivity on the domain fails"
        )
    cond_i = True  # sections are segments by construction of the model
    cond_ii = _gradient_vanishes(b)
    v_segments = v.wall_segments()
    cond_iii = all(
        _segment_covered_with_bound(seg, v_segments) for seg in b.wall_segments()
    )
    groups = _fiber_groups(VDistributedSet(v, b))
    cond_iv = all(
        abs(slot["b"]) <= 0.5 * abs(slot["v"]) + JUMP_BOUND_TOL
        for slot in groups.values()
    )
    verdict = cond_i and cond_ii and cond_iii and cond_iv

    per_sym = perimeter(steiner_set(v))
    per_set = perimeter(VDistributedSet(v, b))
    agree = abs(per_set.total - per_sym.total) <= 1e-9 * max(per_sym.total, 1.0)
    return EqualityCaseReport(
        cond_i, cond_ii, cond_iii, cond_iv, verdict, per_set.total, per_sym.total, agree
    )


# ---------------------------------------------------------------------------
# rigidity


@dataclass(frozen=True)
class RigidityReport:
    rigid: bool
    verdict: MinimalSingularityVerdict
    positivity: PositivityReport

    def to_dict(self) -> dict:
        return {
            "rigid": self.rigid,
            "coverage": self.verdict.coverage,
            "class_count": self.verdict.class_count,
            "node_count": self.verdict.node_count,
            "witness": list(self.verdict.witness) if self.verdict.witness else None,
            "positivity_min": self.positivity.min_value,
        }


def rigidity_test(
    v: StructuredBVField,
    resolution: float,
    tol: float = 0.01,
    connectivity: int = 8,
) -> RigidityReport:
    """Rigidity holds on the domain exactly when v is minimally singular.

    Edge weights are degree-1 homogeneous in the singular data, so testing
    v and v/2 yields identical zero classes; the half factor only enters
    the counterexample's height bounds, where it is applied explicitly.
    """
    G = build_graph(v, resolution, connectivity)
    pos = positivity_report(v, G)
    if not pos.ok:
        raise PreconditionError(
            f"lower limit of v is {pos.min_value} at {pos.witness}; "
            "rigidity test requires positivity on the domain"
        )
    verdict = is_minimally_singular(v, resolution, tol, connectivity, graph=G)
    return RigidityReport(verdict.minimally_singular, verdict, pos)


def counterexample(
    v: StructuredBVField,
    source: Point | None = None,
    scale: float = 1.0,
    resolution: float = 0.05,
    connectivity: int = 8,
) -> VDistributedSet:
    """Perimeter-preserving non-translate set for a non-rigid pure-jump v.

    The barycenter is class-wise constant: scale times the half-metric
    distance from the source class, realized as a flat field whose walls
    are the inter-class interfaces with heights equal to the class-value
    differences.  Those heights never exceed half the local v jump, so the
    equality-case conditions hold by construction.
    """
    if v.channels:
        raise ContractError(
            "counterexample construction supports pure-jump fields only"
        )
    if not 0.0 < scale <= 1.0:
        raise ContractError("scale must lie in (0, 1]")
    G = build_graph(v, resolution, connectivity)
    classes = zero_classes(G)
    verdict = is_minimally_singular(v, resolution, connectivity=connectivity, graph=G)
    if verdict.minimally_singular:
        raise ContractError("field is minimally singular: no counterexample exists")
    src = classes[0][0] if source is None else G.nearest_node(source)
    m = svd_map(G, src)
    node_value: dict[int, float] = {}
    for cls in classes:
        val = m.dist[cls[0]]
        if math.isinf(val):
            raise ContractError("admissible lattice is disconnected at this resolution")
        for u in cls:
            node_value[u] = 0.5 * val * scale

    def side_value(p: Point, q: Point, mid: Point, normal: Point) -> float | None:
        """Class value just off the wall on the side `normal` points into:
        nearest node that genuinely lies on that side of the supporting
        line, probed at increasing clearances."""
        for mult in (1.0 / 3.0, 2.0 / 3.0, 1.0, 1.5):
            delta = mult * resolution
            probe = (mid[0] + delta * normal[0], mid[1] + delta * normal[1])
            best, best_d = None, math.inf
            for idx, node in enumerate(G.nodes):
                d2 = (node[0] - probe[0]) ** 2 + (node[1] - probe[1]) ** 2
                if d2 < best_d:
                    best, best_d = idx, d2
            if best is None or best_d > (2.0 * resolution) ** 2:
                continue
            if orient(p, q, G.nodes[best]) == orient(p, q, probe):
                return node_value[best]
        return None

    walls: list[JumpWall] = []
    for p, q, _h in v.wall_segments():
        seg_len = math.hypot(q[0] - p[0], q[1] - p[1])
        d = ((q[0] - p[0]) / seg_len, (q[1] - p[1]) / seg_len)
        n_left, n_right = (-d[1], d[0]), (d[1], -d[0])
        chunks = max(1, int(math.ceil(seg_len / resolution)))
        runs: list[tuple[float, float, float]] = []  # (t0, t1, height)
        for k in range(chunks):
            t0, t1 = seg_len * k / chunks, seg_len * (k + 1) / chunks
            tm = 0.5 * (t0 + t1)
            mid = (p[0] + tm * d[0], p[1] + tm * d[1])
            left = side_value(p, q, mid, n_left)
            right = side_value(p, q, mid, n_right)
            if left is None or right is None:
                continue
            h = right - left
            if abs(h) <= 1e-13:
                continue
            if runs and runs[-1][2] == h and abs(runs[-1][1] - t0) < 1e-12:
                runs[-1] = (runs[-1][0], t1, h)
            else:
                runs.append((t0, t1, h))
        for t0, t1, h in runs:
            a_pt = (p[0] + t0 * d[0], p[1] + t0 * d[1])
            c_pt = (p[0] + t1 * d[0], p[1] + t1 * d[1])
            walls.append(JumpWall.build([a_pt, c_pt], h))

    b = StructuredBVField.build(
        v.domain, smooth=0.0, walls=walls, anchor=G.nodes[src], depth=v.depth
    )
    return VDistributedSet(v, b)
