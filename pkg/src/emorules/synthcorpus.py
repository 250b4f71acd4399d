"""Procedural faces whose five features are known by construction.

Faces are stylised: a skin-toned oval, two red-orange eye blobs (bright in
the chroma eye map), dark brow strokes following a given top-edge profile,
red lips with teeth between them when the mouth is open, and dark forehead
furrows. The whole image is blurred slightly so edges are not perfectly
sharp.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .classify import EMOTIONS, RuleTable, Emotion
from .features import FeatureVector
from .locate import EyePair, RegionGeometry, derive_regions
from .raster import FACE_HEIGHT, FACE_WIDTH, Rect, ellipse_mask

SKIN = (222, 172, 140)
BACKGROUND = (90, 110, 130)
EYE = (235, 70, 15)
BROW = (55, 38, 30)
LIPS = (200, 55, 70)
TEETH = (238, 236, 226)
FURROW = (120, 85, 70)

BROW_THICKNESS = 5
BROW_INSET = 4          # columns between the eye column and the brow's inner end
BROW_LENGTH = 41
LIP_THICKNESS = 7
FURROW_THICKNESS = 2
FURROW_SPACING = 7
FURROW_FIRST = 91       # rows above the eye line of the first furrow
MOUTH_CENTER = (300, 140)
EYE_RADII = (4, 10)     # (rows, cols)
BLUR_SIGMA = 1.0
MARGIN = 0.10


class SpecError(ValueError):
    """A FaceSpec whose implied features do not sit safely inside its rule row."""


@dataclass(frozen=True)
class FaceSpec:
    emotion: Emotion
    mouth_open_rows: int
    corner_span: int
    brow_heights: tuple          # top-edge row of the brow, per column, relative to the brow window
    furrow_count: int
    eye_centers: tuple = ((150, 90), (150, 190))
    furrow_length: int = 70
    seed: int = 0

    @property
    def eyes(self) -> EyePair:
        return EyePair(*self.eye_centers)

    def brow_window(self) -> Rect:
        return derive_regions(self.eyes).left_brow

    def implied_features(self) -> FeatureVector:
        h = np.asarray(self.brow_heights, dtype=float)
        ebc = float(np.abs(np.diff(h)).sum() / h.size)
        centre = h.mean() + (BROW_THICKNESS - 1) / 2.0
        ebm = float(centre / self.brow_window().h)
        return FeatureVector(mo=float(self.mouth_open_rows), lc=float(self.corner_span),
                             w=float(2 * self.furrow_count * self.furrow_length), ebc=ebc, ebm=ebm)


def check_margins(fv: FeatureVector, emotion: Emotion, rules: RuleTable = RuleTable(),
                  margin: float = MARGIN) -> None:
    sides = rules.sides(fv)
    if sides != rules.rows[emotion]:
        raise SpecError(f"{fv} does not match the {emotion.value} row")
    for f in rules.thresholds:
        t = rules.thresholds[f]
        v = getattr(fv, f)
        # a closed mouth (0) is as far on the low side as it gets
        if abs(v - t) < margin * t:
            raise SpecError(f"{f}={v} is within {margin:.0%} of its threshold {t}")


def _fill(img, mask, color):
    img[mask] = color


def _ellipse(shape, center, radii):
    rows = (np.arange(shape[0]) - center[0]) / radii[0]
    cols = (np.arange(shape[1]) - center[1]) / radii[1]
    return rows[:, None] ** 2 + cols[None, :] ** 2 <= 1.0


def _blur(img: np.ndarray, sigma: float) -> np.ndarray:
    out = ndimage.gaussian_filter(img.astype(np.float64), sigma=(sigma, sigma, 0), mode="nearest")
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def draw_mouth(img: np.ndarray, center: tuple, open_rows: int, span: int,
               lips=LIPS, teeth=TEETH, thickness: int = LIP_THICKNESS) -> None:
    """Lip bands spanning ``span`` columns; two bands ``open_rows`` apart, or one when closed."""
    row, col = center
    c0 = int(round(col - span / 2.0))
    c1 = c0 + span + 1
    half = thickness // 2
    if open_rows <= 0:
        img[row - half:row - half + thickness, c0:c1] = lips
        return
    top = row - open_rows // 2
    bottom = top + open_rows
    img[top + half + 1:bottom - half, c0:c1] = teeth
    for r in (top, bottom):
        img[r - half:r - half + thickness, c0:c1] = lips


def draw_brow(img: np.ndarray, window: Rect, heights, columns, color=BROW,
              thickness: int = BROW_THICKNESS) -> None:
    for c, h in zip(columns, heights):
        r = window.y0 + int(h)
        img[r:r + thickness, c] = color


def lips_patch(bands=(), span=None, height: int = 132, width: int = FACE_WIDTH,
               skin=SKIN, lips=LIPS, thickness: int = LIP_THICKNESS, teeth=TEETH,
               blur: float = BLUR_SIGMA) -> np.ndarray:
    """A lips-window-sized RGB patch with horizontal lip bands at the given rows.

    ``span`` is ``(first_col, last_col)`` inclusive; defaults to the middle third.
    Space between two bands is filled with teeth.
    """
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:] = skin
    c0, c1 = span if span is not None else (width // 3, 2 * width // 3)
    half = thickness // 2
    bands = sorted(bands)
    if len(bands) == 2:
        img[bands[0] + half + 1:bands[1] - half, c0:c1 + 1] = teeth
    for r in bands:
        img[r - half:r - half + thickness, c0:c1 + 1] = lips
    return _blur(img, blur) if blur > 0 else img


def brow_profile(rng: np.random.Generator, amplitude: int, step: int, crest: int, dip: int,
                 length: int = BROW_LENGTH) -> np.ndarray:
    """Flat runs joined by slopes of ``step`` rows per column, random phase.

    Rows grow downwards, so level 0 runs (``crest`` columns) are the high
    points of the brow and level ``amplitude`` runs (``dip`` columns) the low
    ones. Runs narrower than about four columns do not survive the blur.
    """
    seq = []
    level = 0
    going_down = True
    while len(seq) < 2 * length + 2 * (crest + dip + amplitude):
        seq.extend([level] * (crest if level == 0 else dip))
        target = amplitude if going_down else 0
        while level != target:
            level = min(max(level + (step if going_down else -step), 0), amplitude)
            seq.append(level)
        going_down = not going_down
    period = crest + dip + 2 * -(-amplitude // step)
    start = int(rng.integers(0, period))
    return np.asarray(seq[start:start + length])


def render_face(spec: FaceSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    rng = rng or np.random.default_rng(spec.seed)
    jitter = lambda color, amount=6: tuple(int(np.clip(v + rng.integers(-amount, amount + 1), 0, 255))
                                           for v in color)
    shape = (FACE_HEIGHT, FACE_WIDTH)
    img = np.empty(shape + (3,), dtype=np.uint8)
    img[:] = BACKGROUND
    img[ellipse_mask(*shape, Rect(0, 0, FACE_WIDTH, FACE_HEIGHT))] = jitter(SKIN)

    eye_color = jitter(EYE)
    for center in spec.eye_centers:
        _fill(img, _ellipse(shape, center, EYE_RADII), eye_color)

    eyes = spec.eyes
    regions = derive_regions(eyes)
    heights = np.asarray(spec.brow_heights)
    (_, lcol), (_, rcol) = spec.eye_centers
    brow_color = jitter(BROW)
    left_cols = np.arange(lcol - BROW_INSET - len(heights) + 1, lcol - BROW_INSET + 1)
    right_cols = np.arange(rcol + BROW_INSET, rcol + BROW_INSET + len(heights))
    draw_brow(img, regions.left_brow, heights, left_cols, brow_color)
    draw_brow(img, regions.right_brow, heights[::-1], right_cols, brow_color)

    eye_row = (spec.eye_centers[0][0] + spec.eye_centers[1][0]) / 2.0
    mid_col = (lcol + rcol) / 2.0
    furrow_color = jitter(FURROW)
    for k in range(spec.furrow_count):
        r = int(round(eye_row - FURROW_FIRST + k * FURROW_SPACING))
        c0 = int(round(mid_col - spec.furrow_length / 2.0))
        img[r:r + FURROW_THICKNESS, c0:c0 + spec.furrow_length] = furrow_color

    draw_mouth(img, MOUTH_CENTER, spec.mouth_open_rows, spec.corner_span, jitter(LIPS), jitter(TEETH, 4))
    return _blur(img, BLUR_SIGMA)


def check_layout(spec: FaceSpec) -> None:
    window = spec.brow_window()
    h = np.asarray(spec.brow_heights)
    if h.min() < 2 or h.max() + BROW_THICKNESS > window.h - 3:
        raise SpecError(f"brow rows {h.min()}..{h.max()} do not fit a {window.h}-row brow window")
    if spec.mouth_open_rows and not 2 * LIP_THICKNESS <= spec.mouth_open_rows <= 2 * (MOUTH_CENTER[0] - 270):
        raise SpecError(f"mouth opening {spec.mouth_open_rows} outside the drawable range")


def generate_face(spec: FaceSpec, rules: RuleTable = RuleTable()) -> tuple[np.ndarray, FeatureVector]:
    truth = spec.implied_features()
    check_margins(truth, spec.emotion, rules)
    check_layout(spec)
    return render_face(spec), truth


# feature ranges used for each rule side, all at least 10% clear of the thresholds
RANGES = {
    "mo": {"High": (34, 46)},
    "lc": {"High": (72, 96), "Low": (26, 40)},
    "furrows": {"High": (2, 3), "Low": (0, 0)},
    "furrow_length": (60, 80),
    # (amplitude, step, crest, dip) choices for the brow profile
    "ebc": {"High": [(6, 2, 4, 4), (6, 3, 4, 4), (4, 4, 3, 5), (6, 2, 3, 5)],
            "Low": [(1, 1, 4, 4), (1, 1, 5, 5), (2, 1, 5, 5), (2, 1, 4, 7)]},
    "ebm": {"High": (0.78, 0.84), "Low": (0.46, 0.60)},
}


def random_spec(emotion: Emotion, rng: np.random.Generator, rules: RuleTable = RuleTable()) -> FaceSpec:
    mo_s, lc_s, w_s, ebc_s, ebm_s = rules.rows[emotion]
    eye_row = int(rng.integers(142, 159))
    offset = int(rng.integers(88, 95))
    eye_centers = ((eye_row, offset), (eye_row, FACE_WIDTH - 1 - offset))

    mouth = int(rng.integers(*RANGES["mo"]["High"], endpoint=True)) if mo_s == "High" else 0
    span = int(rng.integers(*RANGES["lc"][lc_s], endpoint=True))
    furrows = int(rng.integers(*RANGES["furrows"][w_s], endpoint=True))
    length = int(rng.integers(*RANGES["furrow_length"], endpoint=True))

    choices = RANGES["ebc"][ebc_s]
    profile = brow_profile(rng, *choices[int(rng.integers(len(choices)))])

    window = derive_regions(EyePair(*eye_centers)).left_brow
    target = rng.uniform(*RANGES["ebm"][ebm_s])
    base = int(round(target * window.h - profile.mean() - (BROW_THICKNESS - 1) / 2.0))
    heights = tuple(int(h) + base for h in profile)
    return FaceSpec(emotion, mouth, span, heights, furrows, eye_centers, length,
                    seed=int(rng.integers(2 ** 31)))


@dataclass(frozen=True)
class SuiteItem:
    name: str
    image: np.ndarray
    emotion: Emotion
    truth: FeatureVector
    spec: FaceSpec = field(repr=False)


def generate_suite(count: int, seed: int = 1, rules: RuleTable = RuleTable()) -> list[SuiteItem]:
    """``count`` faces per emotion, in rule-table order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    items = []
    for emotion in EMOTIONS:
        for i in range(count):
            spec = random_spec(emotion, rng, rules)
            image, truth = generate_face(spec, rules)
            items.append(SuiteItem(f"{emotion.value.lower()}_{i:03d}.png", image, emotion, truth, spec))
    return items
