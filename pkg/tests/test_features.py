import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emorules.config import Config
from emorules.features import (ExtractionError, FeatureVector, brow_line, compute_n, corner_map,
                               eyebrow_curvature_dcl, eyebrow_mean_mgii, find_corners, line_curvature,
                               mean_high_row, mouth_corners, mouth_map, mouth_map_raw, mouth_opening,
                               wrinkle_intensity)
from emorules.pipeline import extract_features
from emorules.raster import ChromaImage, to_ycbcr
from emorules.synthcorpus import EYE, FaceSpec, generate_face, lips_patch, render_face
from emorules.classify import Emotion, RuleTable


def chroma(cr, cb):
    cr = np.asarray(cr, dtype=np.float64) * 255.0
    cb = np.asarray(cb, dtype=np.float64) * 255.0
    return ChromaImage(np.zeros_like(cr), cb, cr)


# --- feature vector ---------------------------------------------------------

def test_feature_vector_invariants():
    FeatureVector(0, 0, 0, 0, 1.0)
    with pytest.raises(ValueError):
        FeatureVector(-1, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        FeatureVector(0, 0, 0, 0, 1.2)


# --- mouth map ---------------------------------------------------------------

def test_compute_n_examples():
    assert compute_n(chroma(np.ones((4, 4)), np.ones((4, 4)))) == pytest.approx(0.95, abs=1e-12)
    board = np.where(np.indices((6, 6)).sum(axis=0) % 2 == 0, 0.4, 0.8)
    assert compute_n(chroma(board, np.full((6, 6), 0.5))) == pytest.approx(0.95 * 0.40 / 1.2, abs=1e-12)


def test_mouth_map_zero_red_and_two_regions():
    no_red = chroma(np.zeros((3, 3)), np.full((3, 3), 0.5))
    assert compute_n(no_red) == 0.0 and (mouth_map(no_red) == 0).all()
    cr = np.full((10, 10), 0.6)
    cb = np.full((10, 10), 0.6)
    cr[3:7, 2:8], cb[3:7, 2:8] = 0.8, 0.5
    mm = mouth_map(chroma(cr, cb))
    assert mm[5, 5] > mm[0, 0] and mm.max() == 1.0


def test_mouth_opening_bands_and_blank():
    count, mo = mouth_opening(to_ycbcr(lips_patch([30, 70])))
    assert count == 2 and abs(mo - 40) <= 4.5
    assert mouth_opening(to_ycbcr(lips_patch([66]))) == (1, 0.0)
    assert mouth_opening(to_ycbcr(lips_patch([]))) == (0, 0.0)


@settings(max_examples=15, deadline=None)
@given(st.integers(15, 90), st.integers(10, 30))
def test_mouth_opening_never_exceeds_window(sep, top):
    count, mo = mouth_opening(to_ycbcr(lips_patch([top, min(top + sep, 125)])))
    assert 0 <= mo <= 132
    assert mo == 0 or count >= 2


def test_mouth_opening_rejects_tiny_window():
    with pytest.raises(ExtractionError) as info:
        mouth_opening(to_ycbcr(lips_patch([3], height=6)))
    assert info.value.stage == "mouth_opening"


# --- eyebrows ------------------------------------------------------------------

def test_mean_high_row_examples():
    g = np.zeros((20, 12))
    g[14] = 1.0
    assert mean_high_row(g) == pytest.approx(0.7)
    g = np.zeros((20, 12))
    g[0] = 1.0
    assert mean_high_row(g) == 0.0
    with pytest.raises(ExtractionError):
        mean_high_row(np.zeros((20, 12)))


def test_mgii_on_a_dark_line():
    brow = np.full((20, 30), 220, dtype=np.uint8)
    brow[14] = 40
    assert eyebrow_mean_mgii(brow) == pytest.approx(0.7)
    with pytest.raises(ExtractionError):
        eyebrow_mean_mgii(np.full((20, 30), 90, np.uint8))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 37), st.integers(30, 60))
def test_mgii_scales_with_row_and_is_mirror_invariant(r, width):
    brow = np.full((40, width), 220, dtype=np.uint8)
    brow[r, 3:width - 3] = 30
    ebm = eyebrow_mean_mgii(brow)
    assert ebm == pytest.approx(r / 40)
    assert eyebrow_mean_mgii(brow[:, ::-1].copy()) == pytest.approx(ebm)


def test_brow_line_and_curvature_examples():
    edges = np.zeros((6, 5), dtype=bool)
    edges[[2, 3, 1], [0, 1, 4]] = True
    assert brow_line(edges).tolist() == [2, 3, -1, -1, 1]
    assert line_curvature([2, 3, -1, -1, 1]) == pytest.approx(3 / 3)
    assert line_curvature([5, 5, 5, 5, 5]) == 0.0
    assert line_curvature([0, 1, 2, 3, 4]) == 0.8
    assert line_curvature([2, 1, 0, 1, 2]) == 0.8
    with pytest.raises(ExtractionError):
        line_curvature([-1, 4, -1])


lines = st.lists(st.integers(0, 40), min_size=2, max_size=80)


@given(lines, st.integers(0, 30))
def test_curvature_invariances(h, shift):
    h = np.array(h)
    base = line_curvature(h)
    assert base >= 0
    assert line_curvature(h + shift) == base
    assert line_curvature(h[::-1]) == base


def _brow_image(heights, thickness=5, pad=6):
    brow = np.full((30, len(heights) + 2 * pad, 3), 220, dtype=np.uint8)
    for c, h in enumerate(heights):
        brow[h:h + thickness, pad + c] = 50
    return brow


def test_dcl_on_flat_and_stepped_brows():
    assert eyebrow_curvature_dcl(_brow_image([10] * 30)) == 0.0
    stepped = [10] * 10 + [14] * 10 + [10] * 10
    ebc = eyebrow_curvature_dcl(_brow_image(stepped))
    # the Sobel response reaches one column past each end of the brow
    assert ebc == pytest.approx(8 / 32)
    assert eyebrow_curvature_dcl(_brow_image(stepped)[:, ::-1].copy()) == ebc
    with pytest.raises(ExtractionError):
        eyebrow_curvature_dcl(np.full((20, 20, 3), 220, np.uint8))


# --- mouth corners ---------------------------------------------------------------

def test_corner_map_values():
    g = np.array([[255, 0, 128]], dtype=np.uint8)
    assert corner_map(g)[0, 0] == 0.0 and corner_map(g)[0, 1] == 1.0
    assert corner_map(np.array([[0.5]]))[0, 0] == pytest.approx(0.015625)


def test_corner_map_strictly_decreasing():
    g = np.arange(256, dtype=np.uint8)[None, :]
    assert (np.diff(corner_map(g)[0]) < 0).all()


def test_corners_of_a_blob():
    corners = mouth_corners(to_ycbcr(lips_patch([60], span=(40, 120), blur=0)))
    assert abs(corners.left[1] - 40) <= 2 and abs(corners.right[1] - 120) <= 2
    assert abs(corners.lc - 80) <= 4
    flipped = mouth_corners(to_ycbcr(lips_patch([60], span=(40, 120), blur=0)[:, ::-1].copy()))
    assert flipped.lc == corners.lc
    assert flipped.left[1] == 280 - corners.right[1]


def test_corners_undilated_blob_are_exact():
    corners = mouth_corners(to_ycbcr(lips_patch([60], span=(40, 120), blur=0)), dilate_radius=0)
    assert corners.left[1] == 40 and corners.right[1] == 120 and corners.lc == 80


def test_corners_fail_on_white():
    with pytest.raises(ExtractionError) as info:
        mouth_corners(to_ycbcr(np.full((40, 60, 3), 255, np.uint8)))
    assert info.value.stage == "mouth_corners"


def test_valid_mask_excludes_pixels():
    cmap = np.zeros((5, 9))
    cmap[2, 1], cmap[2, 4], cmap[2, 7] = 1.0, 0.8, 0.9
    assert find_corners(cmap).left == (2, 1)
    patch = lips_patch([20], span=(30, 60), blur=0, height=40, width=100)
    patch[:, :10] = 0
    valid = np.ones((40, 100), dtype=bool)
    valid[:, :13] = False
    assert mouth_corners(to_ycbcr(patch), valid=valid).left[1] == 32


# --- wrinkles ---------------------------------------------------------------------

def _forehead(rows, length=40):
    p = np.full((76, 101), 200, np.uint8)
    for r in rows:
        p[r:r + 2, 30:30 + length] = 120
    return p


def test_wrinkle_examples():
    assert wrinkle_intensity(np.full((40, 40), 128, np.uint8)) == 0
    three = wrinkle_intensity(_forehead([20, 27, 34]))
    assert abs(three - 240) <= 0.2 * 240
    assert wrinkle_intensity(_forehead([20, 40])) > wrinkle_intensity(_forehead([20]))


# --- whole faces -------------------------------------------------------------------

def _spec(emotion, **kw):
    base = dict(mouth_open_rows=0, corner_span=32, furrow_count=0, brow_heights=(20,) * 41)
    base.update(kw)
    return FaceSpec(emotion, **base)


def test_happy_face_lands_in_happy_region():
    heights = tuple(([46] * 5 + [50] * 5) * 4 + [46])
    spec = _spec(Emotion.HAPPY, mouth_open_rows=40, corner_span=80, brow_heights=heights)
    fv = extract_features(render_face(spec))
    assert fv.mo > 25 and fv.lc > 50 and fv.w < 200 and fv.ebc >= 0.5 and fv.ebm >= 0.7


def test_disgust_face_lands_in_disgust_region():
    spec = _spec(Emotion.DISGUST, furrow_count=3, brow_heights=tuple([6] * 41))
    img, truth = generate_face(spec)
    fv = extract_features(img)
    assert RuleTable().sides(fv) == RuleTable().rows[Emotion.DISGUST]
    assert abs(fv.w - truth.w) <= 0.2 * truth.w


def test_occluded_eye_reports_stage():
    img = render_face(_spec(Emotion.NEUTRAL, brow_heights=tuple([20] * 41)))
    eye = np.all(np.abs(img.astype(int) - EYE) < 60, axis=2)
    cols = np.nonzero(eye.any(axis=0))[0]
    img[:, cols[cols > 140]] = img[100, 140]   # paint skin over the right eye
    with pytest.raises(ExtractionError) as info:
        extract_features(img)
    assert info.value.stage == "locate_eyes"


def test_extraction_is_deterministic_and_traced():
    img = render_face(_spec(Emotion.NEUTRAL))
    trace = {}
    a = extract_features(img, Config(), trace=trace)
    assert a == extract_features(img.copy())
    assert {"eye_map", "eyes", "regions", "mouth", "corners", "brows", "wrinkle"} <= set(trace)
    assert trace["features"] == a


def test_face_rect_crops_before_resizing():
    img = render_face(_spec(Emotion.NEUTRAL))
    framed = np.zeros((500, 400, 3), dtype=np.uint8)
    framed[60:441, 50:331] = img
    from emorules.raster import Rect
    assert extract_features(framed, face_rect=Rect(50, 60, 281, 381)) == extract_features(img)
