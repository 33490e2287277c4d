"""Chain validation, arc-length parameterization, wall crossings."""

import math

import pytest

from svdist.chains import (
    Domain,
    PolygonalChain,
    orient,
    segments_intersect,
    validate_chain,
    wall_crossings,
)
from svdist.errors import ChainRejected, ContractError

SQUARE = Domain.rect(0.0, 0.0, 1.0, 1.0)


def test_orientation_signs():
    assert orient((0, 0), (1, 0), (0, 1)) == 1
    assert orient((0, 0), (1, 0), (0, -1)) == -1
    assert orient((0, 0), (1, 0), (2, 0)) == 0
    # near-degenerate case decided exactly
    assert orient((0, 0), (1, 1e-17), (2, 0)) == -1


def test_two_point_chain():
    c = validate_chain(SQUARE, [(0.1, 0.1), (0.7, 0.9)])
    assert c.segment_count == 1
    assert c.params[1] == pytest.approx(math.hypot(0.6, 0.8), abs=1e-15)


def test_revisiting_start_rejected():
    with pytest.raises(ChainRejected):
        validate_chain(
            SQUARE, [(0.2, 0.2), (0.8, 0.2), (0.8, 0.8), (0.2, 0.8), (0.2, 0.2)]
        )


def test_l_shape_frames():
    c = validate_chain(SQUARE, [(0.1, 0.1), (0.6, 0.1), (0.6, 0.8)])
    assert c.segment_count == 2
    e1, e2 = c.direction(0), c.direction(1)
    assert e1[0] * e2[0] + e1[1] * e2[1] == pytest.approx(0.0, abs=1e-15)
    assert c.params == (0.0, 0.5, pytest.approx(0.5 + 0.7))
    eta, foot, off = c.frame(0)
    assert eta == (1.0, 0.0)
    assert foot == (0.0, 0.1)
    assert off == 0.1


def test_zero_length_segment_rejected():
    with pytest.raises(ChainRejected) as e:
        validate_chain(SQUARE, [(0.1, 0.1), (0.1, 0.1), (0.5, 0.5)])
    assert e.value.segment == 0


def test_exits_domain_rejected():
    with pytest.raises(ChainRejected):
        validate_chain(SQUARE, [(0.5, 0.5), (1.5, 0.5)])


def test_self_intersection_rejected():
    with pytest.raises(ChainRejected):
        validate_chain(
            SQUARE, [(0.1, 0.1), (0.9, 0.9), (0.9, 0.1), (0.1, 0.9)]
        )


def test_fold_back_rejected():
    with pytest.raises(ChainRejected):
        validate_chain(SQUARE, [(0.1, 0.5), (0.9, 0.5), (0.5, 0.5)])


def test_polygon_domain_containment():
    tri = Domain.from_polygon([(0, 0), (2, 0), (0, 2)])
    assert tri.contains((0.5, 0.5))
    assert not tri.contains((1.5, 1.5))
    assert not tri.contains((1.0, 1.0))  # on the hypotenuse
    with pytest.raises(ChainRejected):
        validate_chain(tri, [(0.2, 0.2), (1.4, 1.4)])
    c = validate_chain(tri, [(0.2, 0.2), (0.8, 0.8)])
    assert c.length == pytest.approx(math.hypot(0.6, 0.6))


def test_nonsimple_polygon_rejected():
    with pytest.raises(ContractError):
        Domain.from_polygon([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_parallel_wall_no_crossing():
    c = validate_chain(SQUARE, [(0.1, 0.2), (0.9, 0.2)])
    assert wall_crossings(c, [((0.1, 0.5), (0.9, 0.5))]) == []


def test_single_crossing_midpoint():
    c = validate_chain(SQUARE, [(0.0 + 1e-9, 0.5), (1.0 - 1e-9, 0.5)])
    # vertical wall, oriented upward: west side is its left
    hits = wall_crossings(c, [((0.5, 0.1), (0.5, 0.9))])
    assert len(hits) == 1
    t, sign, widx = hits[0]
    assert t == pytest.approx(0.5 - 1e-9, abs=1e-12)
    assert sign == 1
    assert widx == 0


def test_zigzag_opposite_signs():
    c = validate_chain(SQUARE, [(0.2, 0.2), (0.8, 0.4), (0.2, 0.6)])
    hits = wall_crossings(c, [((0.5, 0.1), (0.5, 0.9))])
    assert [sign for _, sign, _ in hits] == [1, -1]


def test_reversal_flips_signs_and_order():
    c = validate_chain(SQUARE, [(0.2, 0.2), (0.8, 0.4), (0.2, 0.6)])
    wall = [((0.5, 0.1), (0.5, 0.9))]
    fwd = wall_crossings(c, wall)
    bwd = wall_crossings(c.reversed(), wall)
    assert [s for _, s, _ in bwd] == [-s for _, s, _ in reversed(fwd)]
    total = c.length
    assert [t for t, _, _ in bwd] == pytest.approx(
        [total - t for t, _, _ in reversed(fwd)], abs=1e-12
    )


def test_crossing_parity_separating_wall():
    wall = [((0.5, 0.0), (0.5, 1.0))]
    same_side = validate_chain(SQUARE, [(0.1, 0.2), (0.8, 0.3), (0.2, 0.7)])
    hits = wall_crossings(same_side, wall)
    assert len(hits) % 2 == 0
    opposite = validate_chain(SQUARE, [(0.1, 0.2), (0.9, 0.8)])
    hits = wall_crossings(opposite, wall)
    assert len(hits) % 2 == 1


def test_tangential_contact_rejected():
    c = validate_chain(SQUARE, [(0.1, 0.5), (0.9, 0.5)])
    with pytest.raises(ChainRejected):
        wall_crossings(c, [((0.3, 0.5), (0.7, 0.5))])  # collinear overlap
    with pytest.raises(ChainRejected):
        wall_crossings(c, [((0.5, 0.5), (0.5, 0.9))])  # wall endpoint on chain


def test_segments_intersect_classification():
    assert segments_intersect((0, 0), (1, 0), (0.5, -1), (0.5, 1)) == "proper"
    assert segments_intersect((0, 0), (1, 0), (1, 0), (2, 5)) == "touch"
    assert segments_intersect((0, 0), (1, 0), (0, 1), (1, 1)) == "none"


def test_point_at_and_reverse_roundtrip():
    c = validate_chain(SQUARE, [(0.1, 0.1), (0.6, 0.1), (0.6, 0.8)])
    p = c.point_at(0.75)
    assert p == pytest.approx((0.6, 0.35))
    r = c.reversed()
    assert r.point_at(r.length - 0.75) == pytest.approx(p)
