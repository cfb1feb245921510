import itertools

import pytest
from hypothesis import given, strategies as st

from brwsim.lattice import BoundaryPolicy, LatticeWindow, OutsideWindowError, index, neighbors, unindex


def test_neighbors_1d():
    w = LatticeWindow(1, 100)
    assert neighbors((0,), w) == [(-1,), (1,)]


def test_neighbors_3d_are_unit_vectors():
    w = LatticeWindow(3, 10)
    nb = neighbors((0, 0, 0), w)
    assert len(nb) == 6
    assert sorted(nb) == sorted(
        [(-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1)]
    )


def test_corner_neighbors_leave_window():
    # side 3, d=1: window is {-1, 0, 1}
    w = LatticeWindow(1, 3, BoundaryPolicy.ERROR)
    assert (w.lower, w.upper) == (-1, 1)
    nb = neighbors((1,), w)
    assert nb == [(0,), (2,)]
    assert not w.contains((2,))
    with pytest.raises(OutsideWindowError):
        w.check((2,))


def test_neighbors_of_outside_point_raise():
    w = LatticeWindow(1, 3)
    with pytest.raises(OutsideWindowError):
        neighbors((5,), w)


def test_round_trip_side5_d2():
    w = LatticeWindow(2, 5)
    for p in itertools.product(range(w.lower, w.upper + 1), repeat=2):
        assert unindex(index(p, w), w) == p


def test_index_injective_side4_d3():
    w = LatticeWindow(3, 4)
    vals = {index(p, w) for p in w.points()}
    assert len(vals) == 64
    assert vals == set(range(64))


def test_origin_index_documented():
    # row-major, last axis fastest, coordinates shifted by side//2
    assert index((0,), LatticeWindow(1, 100)) == 50
    assert index((0, 0, 0), LatticeWindow(3, 100)) == 50 * 10000 + 50 * 100 + 50
    assert index((0, 0), LatticeWindow(2, 5)) == 12


def test_origin_strictly_inside():
    for side in (3, 4, 5, 100):
        w = LatticeWindow(1, side)
        assert w.lower < 0 < w.upper


@pytest.mark.parametrize("d, side", [(0, 5), (1, 2), (2, 1)])
def test_invalid_window(d, side):
    with pytest.raises(ValueError):
        LatticeWindow(d, side)


def test_unindex_out_of_range():
    w = LatticeWindow(1, 5)
    with pytest.raises(OutsideWindowError):
        unindex(5, w)


@given(st.integers(1, 3), st.integers(3, 9), st.data())
def test_round_trip_property(d, side, data):
    w = LatticeWindow(d, side)
    i = data.draw(st.integers(0, w.size - 1))
    p = unindex(i, w)
    assert w.contains(p)
    assert index(p, w) == i
