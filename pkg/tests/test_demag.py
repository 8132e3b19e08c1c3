import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mesl.demag import demag_factors
from mesl.errors import InvalidGeometryError
from oracles import demag_quadrature

TABLE_I = (112.5e-9, 45e-9, 2.5e-9)

edge = st.floats(min_value=1e-9, max_value=1e-6, allow_nan=False)


def test_closed_form_matches_quadrature_table_geometry():
    closed = demag_factors(*TABLE_I)
    ref = demag_quadrature(112.5, 45.0, 2.5)
    for c, r in zip(closed, ref):
        assert abs(c - r) < 1e-10


@pytest.mark.parametrize("dims", [(1, 1, 1), (3, 1, 1), (2, 5, 0.3), (10, 10, 0.5), (1, 7, 2)])
def test_closed_form_matches_quadrature_misc(dims):
    for c, r in zip(demag_factors(*dims), demag_quadrature(*dims)):
        assert abs(c - r) < 1e-9


def test_cube_is_one_third():
    for n in demag_factors(4e-9, 4e-9, 4e-9):
        assert n == pytest.approx(1 / 3, abs=1e-12)


def test_thin_plate_limit():
    nxx, nyy, nzz = demag_factors(1.0, 1.0, 1e-6)
    assert nzz > 0.999
    assert nxx < 1e-3 and nyy < 1e-3


def test_shortest_axis_gets_largest_factor():
    nxx, nyy, nzz = demag_factors(*TABLE_I)
    assert nzz > nyy > nxx


@given(edge, edge, edge)
@settings(max_examples=200, deadline=None)
def test_sum_is_one_and_in_range(a, b, c):
    f = demag_factors(a, b, c)
    assert abs(sum(f) - 1.0) < 1e-9
    assert all(0.0 <= x <= 1.0 for x in f)


@given(edge, edge, edge)
@settings(max_examples=100, deadline=None)
def test_permuting_edges_permutes_factors(a, b, c):
    base = dict(zip("abc", demag_factors(a, b, c)))
    dims = dict(zip("abc", (a, b, c)))
    for perm in itertools.permutations("abc"):
        got = demag_factors(*(dims[k] for k in perm))
        for k, g in zip(perm, got):
            assert g == pytest.approx(base[k], rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1, math.nan), (1, math.inf, 1)])
def test_invalid_geometry(bad):
    with pytest.raises(InvalidGeometryError):
        demag_factors(*bad)
