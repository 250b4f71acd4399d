import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emorules.locate import (EyeLocalizationError, EyePair, RegionError, RegionGeometry,
                             derive_regions, eye_map, eye_map_raw, locate_eyes)
from emorules.raster import FACE_HEIGHT, FACE_WIDTH, ChromaImage, Rect, to_ycbcr
from emorules.synthcorpus import EYE, SKIN


def face_with_eyes(*centers, radii=(4, 10)):
    img = np.empty((FACE_HEIGHT, FACE_WIDTH, 3), dtype=np.uint8)
    img[:] = SKIN
    rows, cols = np.mgrid[:FACE_HEIGHT, :FACE_WIDTH]
    for r, c in centers:
        img[((rows - r) / radii[0]) ** 2 + ((cols - c) / radii[1]) ** 2 <= 1] = EYE
    return img


def test_eye_map_is_zero_without_red_chroma():
    z = np.zeros((3, 3), np.uint8)
    assert (eye_map_raw(ChromaImage(z, np.full((3, 3), 128, np.uint8), z)) == 0).all()


def test_eye_map_range_and_peak():
    em = eye_map(to_ycbcr(face_with_eyes((150, 90))))
    assert em.min() >= 0 and em.max() == 1.0
    assert em[150, 90] == 1.0 and em[300, 140] < 0.1


def test_eye_map_of_flat_plane_is_flat():
    c = to_ycbcr(np.full((5, 5, 3), 128, np.uint8))
    assert np.ptp(eye_map(c)) == 0


def test_locates_two_blobs():
    eyes = locate_eyes(eye_map(to_ycbcr(face_with_eyes((150, 90), (147, 190)))))
    assert abs(eyes.left[0] - 150) <= 2 and abs(eyes.left[1] - 90) <= 2
    assert abs(eyes.right[0] - 147) <= 2 and abs(eyes.right[1] - 190) <= 2


def test_mirrored_image_swaps_eyes():
    img = face_with_eyes((150, 90), (147, 187))
    eyes = locate_eyes(eye_map(to_ycbcr(img)))
    flipped = locate_eyes(eye_map(to_ycbcr(img[:, ::-1].copy())))
    assert flipped == eyes.mirrored(FACE_WIDTH)
    assert flipped.left[0] == eyes.right[0] and flipped.right[0] == eyes.left[0]


def test_single_blob_is_an_error():
    with pytest.raises(EyeLocalizationError):
        locate_eyes(eye_map(to_ycbcr(face_with_eyes((150, 90)))))


def test_blobs_outside_band_are_ignored():
    # a mouth-height blob cannot stand in for a missing eye
    with pytest.raises(EyeLocalizationError):
        locate_eyes(eye_map(to_ycbcr(face_with_eyes((150, 90), (300, 140)))))


def test_empty_map_is_an_error():
    with pytest.raises(EyeLocalizationError):
        locate_eyes(np.zeros((FACE_HEIGHT, FACE_WIDTH)))


def test_eye_pair_order_checked():
    with pytest.raises(ValueError):
        EyePair((10, 50), (10, 40))


def test_regions_for_centred_eyes():
    r = derive_regions(EyePair((150, 90), (150, 190)))
    assert r.left_brow == Rect(41, 81, 99, 61)
    assert r.right_brow == Rect(141, 81, 99, 61)
    assert r.wrinkle == Rect(90, 55, 101, 76)
    assert r.lips == Rect(0, 249, 281, 132)


def test_lips_window_does_not_move_with_eyes():
    a = derive_regions(EyePair((120, 70), (125, 210)))
    b = derive_regions(EyePair((160, 100), (170, 180)))
    assert a.lips == b.lips == Rect(0, 249, 281, 132)


def test_regions_clamp_to_frame():
    r = derive_regions(EyePair((30, 10), (30, 270)))
    assert r.left_brow.x0 == 0 and r.left_brow.y0 == 0
    assert r.right_brow.x1 == FACE_WIDTH


def test_region_empty_after_clamping():
    with pytest.raises(RegionError):
        derive_regions(EyePair((3, 90), (3, 190)))


halves = st.integers(60, 440).map(lambda v: v / 2)


@given(st.integers(90, 200), st.integers(90, 200), halves, halves)
def test_mirror_symmetry_of_regions(lr, rr, lc, rc):
    if lc >= rc:
        lc, rc = rc - 1, lc + 1
    eyes = EyePair((float(lr), lc), (float(rr), rc))
    a = derive_regions(eyes)
    b = derive_regions(eyes.mirrored(FACE_WIDTH))
    assert b.left_brow == a.right_brow.mirrored(FACE_WIDTH)
    assert b.right_brow == a.left_brow.mirrored(FACE_WIDTH)
    assert (b.wrinkle.y0, b.wrinkle.h) == (a.wrinkle.y0, a.wrinkle.h)


def test_geometry_is_configurable():
    g = RegionGeometry(brow_width=0.2, lips_first_row=300)
    r = derive_regions(EyePair((150, 90), (150, 190)), g)
    assert r.left_brow.w == 57 and r.lips == Rect(0, 299, 281, 82)
