"""Lattice singular-vertical-distance engine."""

import math

import pytest

from svdist.bv1d import BVProfile
from svdist.bvfield import (
    CantorChannel,
    JumpWall,
    SmoothGrid,
    StructuredBVField,
    eval_lower,
    scaled,
    with_smooth,
)
from svdist.cantor import cantor_eval
from svdist.chains import Domain
from svdist.errors import ContractError
from svdist.svd import (
    SvdMap,
    build_graph,
    is_minimally_singular,
    is_minimally_singular_profile,
    monotone_along_optimal,
    svd,
    svd_map,
    svd_profile,
    triangle_check,
    zero_classes,
)

SQUARE = Domain.rect(0.0, 0.0, 1.0, 1.0)


def const_field(value=0.0, **kw):
    return StructuredBVField.build(SQUARE, smooth=value, **kw)


def enclosing_ring(h=1.0):
    return JumpWall.build(
        [(0.25, 0.25), (0.25, 0.75), (0.75, 0.75), (0.75, 0.25), (0.25, 0.25)], h
    )


def dangling_wall(h=1.0):
    """Wall from the boundary to an interior tip: does not separate."""
    return JumpWall.build([(0.5, 0.0), (0.5, 0.6)], h)


def brute_force_min(G, src, dst):
    """Oracle: exact minimum singular variation over all simple lattice
    paths, by depth-first enumeration with partial-sum pruning."""
    best = math.inf
    adj = G.adjacency
    visited = [False] * G.node_count

    def dfs(u, acc):
        nonlocal best
        if u == dst:
            best = min(best, acc)
            return
        visited[u] = True
        for v, w in adj[u]:
            if not visited[v] and acc + w <= best:
                dfs(v, acc + w)
        visited[u] = False

    dfs(src, 0.0)
    return best


def test_constant_field_all_weights_zero():
    G = build_graph(const_field(3.0), resolution=0.1, connectivity=8)
    assert G.node_count == 100
    assert all(w == 0.0 for _, _, w in G.edges())
    m = svd_map(G, 0)
    assert all(d == 0.0 for d in m.dist)


def test_separating_wall_edge_weights():
    wall = JumpWall.build([(0.5, 0.0), (0.5, 1.0)], 1.0)
    G = build_graph(const_field(0.0, walls=[wall]), resolution=0.1, connectivity=8)
    crossing = [w for _, _, w in G.edges() if w > 0]
    assert crossing and all(w == 1.0 for w in crossing)


def test_channel_edge_weight_matches_cantor_oracle():
    ch = CantorChannel.build((1.0, 0.0), (0.0, 1.0), 1.0)
    G = build_graph(const_field(0.0, channels=[ch]), resolution=0.1, connectivity=4)
    # horizontal edge from x=0.45 to x=0.55 at any y
    u = G.nearest_node((0.45, 0.35))
    expect = cantor_eval(0.55) - cantor_eval(0.45)
    ws = [w for v, w in G.adjacency[u] if G.nodes[v][0] > G.nodes[u][0]]
    assert ws == [pytest.approx(expect, abs=0.0)]


def test_nonseparating_wall_distance_zero():
    F = const_field(0.0, walls=[dangling_wall(1.0)])
    G = build_graph(F, resolution=0.1, connectivity=8)
    src = G.nearest_node((0.25, 0.25))
    m = svd_map(G, src)
    assert max(m.dist) == 0.0  # chains route around the tip


def test_enclosing_ring_distances():
    F = StructuredBVField.build(
        SQUARE, smooth=1.0, walls=[enclosing_ring(1.0)], anchor=(0.05, 0.05)
    )
    G = build_graph(F, resolution=0.1, connectivity=8)
    outside = G.nearest_node((0.05, 0.05))
    inside = G.nearest_node((0.5, 0.5))
    m = svd_map(G, outside)
    assert m.dist[inside] == 1.0
    assert all(
        m.dist[i] == (1.0 if 0.25 < p[0] < 0.75 and 0.25 < p[1] < 0.75 else 0.0)
        for i, p in enumerate(G.nodes)
    )


def test_svd_identity_and_symmetry():
    F = const_field(0.0, walls=[enclosing_ring(2.0)])
    G = build_graph(F, resolution=0.1, connectivity=8)
    r = svd(G, 5, 5)
    assert r.distance == 0.0 and r.chain is None
    a = G.nearest_node((0.1, 0.1))
    b = G.nearest_node((0.5, 0.5))
    assert svd(G, a, b).distance == svd(G, b, a).distance == 2.0


def test_svd_returns_realizing_chain():
    F = const_field(0.0, walls=[enclosing_ring(1.0)])
    G = build_graph(F, resolution=0.1, connectivity=8)
    a = G.nearest_node((0.05, 0.05))
    b = G.nearest_node((0.45, 0.45))
    r = svd(G, a, b)
    assert r.distance == 1.0
    assert r.chain is not None
    assert r.chain.vertices[0] == G.nodes[a]
    assert r.chain.vertices[-1] == G.nodes[b]


def test_brute_force_oracle_small_grids():
    fields = [
        const_field(0.0, walls=[JumpWall.build([(0.5, 0.0), (0.5, 1.0)], 1.5)]),
        const_field(0.0, walls=[enclosing_ring(0.75)]),
        const_field(0.0, walls=[dangling_wall(2.0)]),
        const_field(
            0.0,
            walls=[dangling_wall(1.0)],
            channels=[CantorChannel.build((1.0, 0.0), (0.0, 1.0), 1.0)],
        ),
    ]
    for F in fields:
        G = build_graph(F, resolution=0.2, connectivity=4)  # 5x5 lattice
        src = 0
        m = svd_map(G, src)
        for dst in range(0, G.node_count, 3):
            assert m.dist[dst] == brute_force_min(G, src, dst)


def test_zero_classes_partitions():
    G0 = build_graph(const_field(1.0), resolution=0.1)
    assert len(zero_classes(G0)) == 1
    Gw = build_graph(
        const_field(0.0, walls=[JumpWall.build([(0.5, 0.0), (0.5, 1.0)], 1.0)]),
        resolution=0.1,
    )
    assert len(zero_classes(Gw)) == 2
    Gr = build_graph(const_field(0.0, walls=[enclosing_ring(1.0)]), resolution=0.1)
    classes = zero_classes(Gr)
    assert len(classes) == 2
    # flood-fill oracle: inside cells vs outside cells
    inside = {
        i
        for i, p in enumerate(Gr.nodes)
        if 0.25 < p[0] < 0.75 and 0.25 < p[1] < 0.75
    }
    assert {frozenset(c) for c in classes} == {
        frozenset(inside),
        frozenset(set(range(Gr.node_count)) - inside),
    }


def test_minimal_singularity_verdicts():
    smooth_only = StructuredBVField.build(
        SQUARE, smooth=SmoothGrid.sample(SQUARE, lambda x, y: x * x + y, 6, 6)
    )
    v1 = is_minimally_singular(smooth_only, resolution=0.1)
    assert v1.minimally_singular and v1.coverage == 1.0

    ring = const_field(0.0, walls=[enclosing_ring(1.0)])
    v2 = is_minimally_singular(ring, resolution=0.1)
    assert not v2.minimally_singular
    assert v2.class_count == 2
    assert v2.violating_node is not None

    dangling = const_field(0.0, walls=[dangling_wall(1.0)])
    v3 = is_minimally_singular(dangling, resolution=0.1)
    assert v3.minimally_singular and v3.coverage == 1.0


def test_monotone_along_optimal_and_corruption():
    F = const_field(0.0, walls=[enclosing_ring(1.0)])
    G = build_graph(F, resolution=0.1)
    m = svd_map(G, G.nearest_node((0.05, 0.05)))
    assert monotone_along_optimal(m)
    # corrupt one predecessor link: point a zero-distance node at a
    # distance-one node
    inside = next(i for i, p in enumerate(G.nodes) if m.dist[i] == 1.0)
    outside = next(
        i for i, p in enumerate(G.nodes) if m.dist[i] == 0.0 and i != m.source
    )
    pred = list(m.pred)
    pred[outside] = inside
    assert not monotone_along_optimal(SvdMap(G, m.source, m.dist, tuple(pred)))


def test_pseudometric_axioms_and_triangle():
    ch = CantorChannel.build((0.8, 0.6), (0.1, 0.8), 0.7)
    F = const_field(0.0, walls=[enclosing_ring(1.25), dangling_wall(0.5)], channels=[ch])
    G = build_graph(F, resolution=0.1, connectivity=8)
    triples = [(0, 17, 33), (5, 50, 80), (2, 40, 77)]
    assert triangle_check(G, triples) >= -1e-12
    for a, b in [(0, 17), (5, 80)]:
        assert svd(G, a, b).distance == svd(G, b, a).distance


def test_lipschitz_bound_against_chain_weights():
    F = const_field(0.0, walls=[enclosing_ring(1.0)])
    G = build_graph(F, resolution=0.1)
    m = svd_map(G, 0)
    for u, v, w in G.edges():
        assert abs(m.dist[u] - m.dist[v]) <= w + 1e-15


def test_homogeneity_exact():
    F = const_field(
        0.0,
        walls=[enclosing_ring(1.5), dangling_wall(0.25)],
        channels=[CantorChannel.build((1.0, 0.0), (0.0, 1.0), 2.0)],
    )
    lam = 2.5
    G1 = build_graph(F, resolution=0.1)
    G2 = build_graph(scaled(F, lam), resolution=0.1)
    m1, m2 = svd_map(G1, 0), svd_map(G2, 0)
    assert all(b == lam * a for a, b in zip(m1.dist, m2.dist))


def test_smooth_part_independence_exact():
    F = const_field(0.0, walls=[enclosing_ring(1.0)])
    bumpy = SmoothGrid.sample(SQUARE, lambda x, y: math.sin(7 * x) * y + x, 9, 9)
    G1 = build_graph(F, resolution=0.1)
    G2 = build_graph(with_smooth(F, bumpy), resolution=0.1)
    assert [e for e in G1.edges()] == [e for e in G2.edges()]
    assert svd_map(G1, 3).dist == svd_map(G2, 3).dist


def test_refinement_never_increases_distances():
    F = const_field(0.0, walls=[enclosing_ring(1.0), dangling_wall(0.5)])
    a_pt, b_pt = (0.1, 0.1), (0.5, 0.5)
    dists = []
    for res, k in [(0.2, 4), (0.1, 8), (0.05, 16)]:
        G = build_graph(F, resolution=res, connectivity=k)
        d = svd(G, G.nearest_node(a_pt), G.nearest_node(b_pt)).distance
        dists.append(d)
    for a, b in zip(dists, dists[1:]):
        assert b <= a + 1e-12


def test_zero_class_rebuild_self_consistency():
    """Field whose walls are the inter-class interfaces with heights equal
    to class-value differences reproduces the original distances."""
    F = StructuredBVField.build(
        SQUARE, smooth=1.0, walls=[enclosing_ring(1.0)], anchor=(0.05, 0.05)
    )
    G = build_graph(F, resolution=0.1)
    src = G.nearest_node((0.05, 0.05))
    m = svd_map(G, src)
    inside = G.nearest_node((0.5, 0.5))
    # the interface between the two classes is the ring itself; heights are
    # the class-value difference (1.0 - 0.0)
    F2 = StructuredBVField.build(
        SQUARE, smooth=0.0, walls=[enclosing_ring(1.0)], anchor=(0.05, 0.05)
    )
    G2 = build_graph(F2, resolution=0.1)
    m2 = svd_map(G2, src)
    assert m2.dist[inside] == m.dist[inside] == 1.0


def test_build_graph_errors():
    with pytest.raises(ContractError):
        build_graph(const_field(0.0), resolution=-1.0)
    with pytest.raises(ContractError):
        build_graph(const_field(0.0), resolution=0.1, connectivity=5)
    with pytest.raises(ContractError):
        build_graph(const_field(0.0), resolution=5.0)  # no lattice points


def test_one_dimensional_specialization():
    smooth = BVProfile.affine(0.0, 1.0, 0.0, 2.0)
    assert is_minimally_singular_profile(smooth).minimally_singular
    jumpy = BVProfile.build(0.0, 1.0, jumps=[(0.5, -1.75)])
    verdict = is_minimally_singular_profile(jumpy)
    assert not verdict.minimally_singular
    assert svd_profile(jumpy, 0.25, 0.75) == 1.75
    assert svd_profile(jumpy, 0.6, 0.9) == 0.0
    assert svd_profile(jumpy, 0.3, 0.3) == 0.0
