"""Essential disconnection, 1-D positivity sets, dense-ball generator."""

import math

import pytest

from svdist.bv1d import BVProfile
from svdist.bvfield import SmoothGrid, StructuredBVField
from svdist.chains import Domain
from svdist.connectivity import (
    CellSet,
    dense_ball_complement,
    essentially_disconnects,
    field_cellsets,
    omega_candidate,
    positivity_set_1d,
)
from svdist.errors import ContractError


def grid_cells(nx, ny):
    return CellSet((0.0, 0.0), 1.0, frozenset((i, j) for i in range(nx) for j in range(ny)))


def empty_k():
    return CellSet((0.0, 0.0), 1.0, frozenset())


def test_empty_k_connected_g():
    G = grid_cells(4, 4)
    assert not essentially_disconnects(empty_k(), G)


def test_empty_k_detects_disconnected_g():
    cells = {(i, j) for i in range(2) for j in range(3)}
    cells |= {(i + 5, j) for i in range(2) for j in range(3)}
    G = CellSet((0.0, 0.0), 1.0, frozenset(cells))
    assert essentially_disconnects(empty_k(), G)


def test_interface_line_disconnects():
    G = grid_cells(6, 4)
    line = CellSet(
        (0.0, 0.0), 1.0, frozenset(), frozenset((2, j, 0) for j in range(4))
    )
    assert essentially_disconnects(line, G)


def test_partial_line_does_not_disconnect():
    G = grid_cells(6, 4)
    partial = CellSet(
        (0.0, 0.0), 1.0, frozenset(), frozenset((2, j, 0) for j in range(2))
    )
    assert not essentially_disconnects(partial, G)


def test_cell_stripe_disconnects():
    G = grid_cells(6, 4)
    stripe = CellSet((0.0, 0.0), 1.0, frozenset((3, j) for j in range(4)))
    assert essentially_disconnects(stripe, G)


def test_monotone_in_k():
    G = grid_cells(6, 4)
    small = frozenset((2, j, 0) for j in range(4))
    big = small | frozenset((4, j, 0) for j in range(4))
    assert essentially_disconnects(CellSet((0, 0), 1.0, frozenset(), small), G)
    assert essentially_disconnects(CellSet((0, 0), 1.0, frozenset(), big), G)


def test_field_cellsets_zero_line():
    wide = Domain.rect(0.0, 0.0, 2.0, 1.0)
    v = StructuredBVField.build(
        wide, smooth=SmoothGrid.sample(wide, lambda x, y: abs(x - 1.0), 21, 11)
    )
    K, G = field_cellsets(v, resolution=0.1)
    assert essentially_disconnects(K, G)


def test_field_cellsets_positive_field_connected():
    square = Domain.rect(0.0, 0.0, 1.0, 1.0)
    v = StructuredBVField.build(square, smooth=1.0)
    K, G = field_cellsets(v, resolution=0.1)
    assert not K.cells and not K.interfaces
    assert not essentially_disconnects(K, G)


def test_cellset_rle_roundtrip():
    cells = frozenset({(0, 0), (1, 0), (2, 0), (4, 0), (0, 2)})
    cs = CellSet((0.0, 0.0), 0.5, cells)
    enc = cs.rle()
    assert enc["rows"]["0"] == [[0, 3], [4, 1]]
    assert enc["rows"]["2"] == [[0, 1]]
    pgm = cs.to_pgm()
    assert pgm.startswith(b"P5\n5 3\n255\n")


def test_positivity_1d_indicator():
    v = BVProfile.build(-1.0, 2.0, base=0.0, jumps=[(0.0, 1.0), (1.0, -1.0)])
    rep = positivity_set_1d(v)
    assert rep.ok
    a, b = rep.interval
    assert a == pytest.approx(0.0, abs=1e-3)
    assert b == pytest.approx(1.0, abs=1e-3)


def test_positivity_1d_tent():
    v = BVProfile.build(0.0, 2.0, base=0.0, pieces=[(0.0, 1.0, 1.0), (1.0, 2.0, -1.0)])
    rep = positivity_set_1d(v)
    assert rep.ok
    a, b = rep.interval
    assert a <= 0.001 and b >= 1.999


def test_positivity_1d_two_components_flagged():
    v = BVProfile.build(
        -1.0,
        4.0,
        base=0.0,
        jumps=[(0.0, 1.0), (1.0, -1.0), (2.0, 1.0), (3.0, -1.0)],
    )
    rep = positivity_set_1d(v)
    assert not rep.ok
    assert 1.0 < rep.witness < 2.0


def test_dense_balls_default_bounds():
    rep = dense_ball_complement(count=1000, seed=7, epsilon=0.1)
    assert rep.summability_ok
    assert rep.radii_sum_bound <= 1.0
    assert rep.area_bound_ok
    assert rep.union_area_bound <= 0.1
    assert rep.union_area_estimate <= 0.1
    assert len(rep.complement.cells) > 0


def test_dense_balls_single_equality():
    # one ball with 2*pi*r = 1 exactly: the bound holds with equality
    r = 1.0 / (2.0 * math.pi)
    rep = dense_ball_complement(count=1, seed=3, epsilon=0.5, radii=[r])
    assert rep.summability_ok
    assert rep.radii_sum_bound == pytest.approx(1.0, abs=1e-15)


def test_dense_balls_doubled_radii_rejected():
    base = dense_ball_complement(count=50, seed=5, epsilon=0.2)
    # reconstruct the default radii and double them
    q = 0.995
    geo1 = (1.0 - q ** 50) / (1.0 - q)
    geo2 = (1.0 - q ** 100) / (1.0 - q * q)
    r0 = 0.999 * min(1.0 / (2.0 * math.pi) / geo1, math.sqrt(0.2 / (math.pi * geo2)))
    doubled = [30.0 * r0 * q ** h for h in range(50)]
    with pytest.raises(ContractError):
        dense_ball_complement(count=50, seed=5, epsilon=0.2, radii=doubled)
    assert base.summability_ok


def test_dense_balls_epsilon_range():
    with pytest.raises(ContractError):
        dense_ball_complement(count=10, seed=1, epsilon=4.0)
    with pytest.raises(ContractError):
        dense_ball_complement(count=0, seed=1, epsilon=0.1)


def test_omega_candidate_positive_field():
    square = Domain.rect(0.0, 0.0, 1.0, 1.0)
    v = StructuredBVField.build(square, smooth=1.0)
    rep = omega_candidate(v, resolution=0.1)
    assert rep.connected
    assert len(rep.cells.cells) == 100


def test_omega_candidate_zero_line_two_components():
    wide = Domain.rect(0.0, 0.0, 2.0, 1.0)
    v = StructuredBVField.build(
        wide, smooth=SmoothGrid.sample(wide, lambda x, y: abs(x - 1.0), 21, 11)
    )
    rep = omega_candidate(v, resolution=0.1)
    assert not rep.connected
    assert rep.component_count == 2
