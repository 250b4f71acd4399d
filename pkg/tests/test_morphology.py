import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from emorules.morphology import (StructuringElement, closing, dilate, disk_se, erode, gradient,
                                 invert, line_se, opening)

from oracles import dilate_bf, disk_mask, erode_bf

planes_u8 = arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12)))
planes_bool = arrays(bool, st.tuples(st.integers(1, 12), st.integers(1, 12)))
radii = st.integers(1, 3)


def test_disk_sizes():
    assert disk_se(1).mask.sum() == 5
    assert disk_se(2).mask.sum() == 13
    assert disk_se(3).mask.sum() == 29
    m = disk_se(2).mask
    assert np.array_equal(m, m.T) and np.array_equal(m, m[::-1, ::-1])


def test_disk_matches_oracle_mask():
    for r in range(1, 6):
        assert np.array_equal(disk_se(r).mask, disk_mask(r))


def test_invalid_elements():
    with pytest.raises(ValueError):
        disk_se(0)
    with pytest.raises(ValueError):
        line_se(4)
    with pytest.raises(ValueError):
        StructuringElement(np.zeros((3, 3), bool), (1, 1))
    with pytest.raises(ValueError):
        StructuringElement(np.ones((3, 3), bool), (3, 0))


def test_single_pixel_grows_into_disk():
    p = np.zeros((7, 7), dtype=np.uint8)
    p[3, 3] = 255
    assert np.array_equal(dilate(p, disk_se(1)) > 0, np.pad(disk_se(1).mask, 2))


def test_single_white_pixel_is_eroded_away():
    p = np.zeros((7, 7), dtype=np.uint8)
    p[3, 3] = 255
    assert (erode(p, disk_se(1)) == 0).all()
    assert (opening(p, disk_se(1)) == 0).all()


def test_border_policy_keeps_full_white_plane():
    p = np.full((5, 6), 255, dtype=np.uint8)
    assert (erode(p, disk_se(2)) == 255).all()
    assert (dilate(np.zeros((5, 6), np.uint8), disk_se(2)) == 0).all()


def test_step_edge_gradient_band():
    p = np.zeros((5, 10), dtype=np.uint8)
    p[:, 5:] = 200
    g = gradient(p, disk_se(1))
    assert g[2].tolist() == [0, 0, 0, 0, 200, 200, 0, 0, 0, 0]


def test_asymmetric_element_matches_oracle():
    se = StructuringElement(np.array([[1, 1, 0], [0, 1, 1]], bool), (0, 1))
    p = np.random.default_rng(0).integers(0, 256, (9, 11), dtype=np.uint8)
    assert np.array_equal(dilate(p, se), dilate_bf(p, se.mask, se.origin))
    assert np.array_equal(erode(p, se), erode_bf(p, se.mask, se.origin))


def test_line_elements():
    h = line_se(3)
    v = line_se(5, horizontal=False)
    assert h.mask.shape == (1, 3) and h.origin == (0, 1)
    assert v.mask.shape == (5, 1) and v.origin == (2, 0)
    p = np.zeros((5, 5), dtype=bool)
    p[2, 1:3] = True  # a 2-px horizontal run does not survive a 3-px opening
    assert not opening(p, h).any()
    p[2, 1:4] = True
    assert np.array_equal(opening(p, h), p)


@settings(max_examples=60, deadline=None)
@given(planes_u8, radii)
def test_matches_brute_force_u8(p, r):
    se, m = disk_se(r), disk_mask(r)
    assert np.array_equal(dilate(p, se), dilate_bf(p, m, (r, r)))
    assert np.array_equal(erode(p, se), erode_bf(p, m, (r, r)))


@settings(max_examples=60, deadline=None)
@given(planes_bool, radii)
def test_matches_brute_force_bool(p, r):
    se, m = disk_se(r), disk_mask(r)
    assert np.array_equal(dilate(p, se), dilate_bf(p, m, (r, r)))
    assert np.array_equal(erode(p, se), erode_bf(p, m, (r, r)))


@settings(max_examples=60, deadline=None)
@given(planes_u8, radii)
def test_duality(p, r):
    se = disk_se(r)
    assert np.array_equal(dilate(p, se), invert(erode(invert(p), se.reflect())))


@settings(max_examples=60, deadline=None)
@given(planes_u8, radii)
def test_opening_is_idempotent_and_anti_extensive(p, r):
    se = disk_se(r)
    o = opening(p, se)
    assert np.array_equal(opening(o, se), o)
    assert (o <= p).all()
    assert (closing(p, se) >= p).all()


@settings(max_examples=60, deadline=None)
@given(planes_u8, radii)
def test_erosion_below_dilation(p, r):
    se = disk_se(r)
    assert (erode(p, se) <= p).all() and (p <= dilate(p, se)).all()
    assert (gradient(p, se) >= 0).all()


@given(st.integers(0, 255), st.integers(1, 10), st.integers(1, 10), radii)
def test_gradient_of_constant_is_zero(v, h, w, r):
    assert (gradient(np.full((h, w), v, np.uint8), disk_se(r)) == 0).all()


def test_float_planes():
    p = np.random.default_rng(5).random((8, 8))
    se = disk_se(1)
    assert np.array_equal(dilate(p, se), dilate_bf(p, disk_mask(1), (1, 1)))
    assert np.allclose(invert(invert(p)), p)
