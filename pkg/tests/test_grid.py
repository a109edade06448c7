import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadspec.grid import GridKind, make_grid, node_coords


def test_dirichlet_spacing_and_nodes():
    g = make_grid(2, "dirichlet-box", 1.0, 5)
    assert g.spacing == 0.5
    np.testing.assert_array_equal(g.axis(), [-1, -0.5, 0, 0.5, 1])


def test_periodic_spacing_and_nodes():
    g = make_grid(2, "periodic-torus", 2 * math.pi, 4)
    assert g.spacing == pytest.approx(math.pi / 2, abs=0, rel=1e-15)
    np.testing.assert_allclose(g.axis(), [0, math.pi / 2, math.pi, 3 * math.pi / 2], rtol=1e-15)


def test_flat_index_3d():
    g = make_grid(3, "dirichlet-box", 1.0, 3)
    assert g.spacing == 1.0
    assert g.flat_index(2, 1, 3) == 20


@pytest.mark.parametrize("flat,expected", [(5, (0.0, 0.0)), (1, (-1.0, -1.0))])
def test_node_coords_2d(flat, expected):
    g = make_grid(2, "dirichlet-box", 1.0, 3)
    np.testing.assert_array_equal(node_coords(g, flat), expected)


def test_node_coords_last_periodic_node():
    g = make_grid(3, "periodic-torus", 2 * math.pi, 4)
    np.testing.assert_allclose(node_coords(g, 64), [3 * math.pi / 2] * 3, rtol=1e-15)


def test_coordinates_match_node_coords():
    g = make_grid(3, "dirichlet-box", 2.0, 4)
    xyz = g.coordinates()
    for f in (1, 7, 30, 64):
        np.testing.assert_array_equal(xyz[f - 1], node_coords(g, f))


@pytest.mark.parametrize(
    "args",
    [(4, "dirichlet-box", 1.0, 5), (2, "dirichlet-box", 0.0, 5), (2, "dirichlet-box", -1.0, 5),
     (2, "periodic-torus", 1.0, 2), (0, "periodic-torus", 1.0, 5)],
)
def test_make_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_out_of_range_flat_index():
    g = make_grid(2, "dirichlet-box", 1.0, 3)
    with pytest.raises(IndexError):
        node_coords(g, 10)
    with pytest.raises(IndexError):
        node_coords(g, 0)


@given(dim=st.integers(1, 3), n=st.integers(3, 7), data=st.data())
def test_round_trip(dim, n, data):
    g = make_grid(dim, "periodic-torus", 1.0, n)
    f = data.draw(st.integers(1, g.size))
    assert g.flat_index(*g.multi_index(f)) == f


@given(dim=st.integers(1, 3), n=st.integers(3, 30), ext=st.floats(1e-3, 1e3))
def test_span_and_positive_spacing(dim, n, ext):
    box = make_grid(dim, GridKind.DIRICHLET, ext, n)
    tor = make_grid(dim, GridKind.PERIODIC, ext, n)
    assert box.spacing > 0 and tor.spacing > 0
    assert box.axis()[0] == -ext and box.axis()[-1] == ext
    assert tor.axis()[0] == 0.0
    assert tor.axis()[-1] == pytest.approx(ext - tor.spacing, rel=1e-12)


def test_periodic_origin_offset():
    g = make_grid(1, "periodic-torus", 2 * math.pi, 4, origin=-math.pi)
    np.testing.assert_allclose(g.axis(), [-math.pi, -math.pi / 2, 0, math.pi / 2], atol=1e-15)
