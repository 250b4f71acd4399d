"""Chroma eye map, eye localization and the facial regions derived from the eyes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import FACE_HEIGHT, FACE_WIDTH, ChromaImage, Rect


class EyeLocalizationError(RuntimeError):
    pass


class RegionError(RuntimeError):
    pass


@dataclass(frozen=True)
class EyePair:
    left: tuple[float, float]   # (row, col)
    right: tuple[float, float]

    def __post_init__(self):
        if not self.left[1] < self.right[1]:
            raise ValueError(f"left eye column must be < right eye column: {self}")

    def mirrored(self, width: int) -> "EyePair":
        (lr, lc), (rr, rc) = self.left, self.right
        return EyePair((rr, width - 1 - rc), (lr, width - 1 - lc))


@dataclass(frozen=True)
class RegionGeometry:
    """Region sizes as fractions of the face frame, all measured from the eyes."""

    brow_width: float = 0.35
    brow_top: float = 0.18
    brow_bottom: float = 0.02
    wrinkle_top: float = 0.25
    wrinkle_bottom: float = 0.05
    lips_first_row: int = 250     # 1-based, inclusive
    lips_last_row: int = 381


@dataclass(frozen=True)
class FaceRegions:
    left_brow: Rect
    right_brow: Rect
    wrinkle: Rect
    lips: Rect

    def as_dict(self) -> dict[str, list[int]]:
        return {k: getattr(self, k).as_list() for k in ("left_brow", "right_brow", "wrinkle", "lips")}


def eye_map_raw(c: ChromaImage) -> np.ndarray:
    cr, cb = c.unit()
    return cr ** 2 * (cr ** 2 - cr / cb) ** 4


def eye_map(c: ChromaImage) -> np.ndarray:
    """Cr-enhancing / Cb-suppressing map, rescaled so its maximum is 1."""
    raw = eye_map_raw(c)
    top = raw.max()
    return raw / top if top > 0 else raw


def _centroid(labels, label):
    rows, cols = np.nonzero(labels == label)
    return float(rows.mean()), float(cols.mean())


def locate_eyes(em: np.ndarray, band=(0.20, 0.55), threshold: float = 0.8) -> EyePair:
    """Centroids of the first bright blob met scanning from each side.

    Only rows inside ``band`` (fractions of the plane height) are searched,
    so the lips, which the map also brightens, are never mistaken for eyes.
    """
    height = em.shape[0]
    r0 = int(round(band[0] * height))
    r1 = int(round(band[1] * height))
    strip = np.asarray(em[r0:r1], dtype=np.float64)
    top = strip.max() if strip.size else 0.0
    if top <= 0:
        raise EyeLocalizationError("eye map is empty inside the search band")
    white = strip >= threshold * top
    labels, count = ndimage.label(white, structure=np.ones((3, 3), dtype=bool))
    if count < 2:
        raise EyeLocalizationError(f"found {count} eye blob(s), need 2")
    occupied = np.nonzero(white.any(axis=0))[0]
    # first white pixel met column by column (top to bottom within a column)
    left_label = labels[:, occupied[0]][white[:, occupied[0]]][0]
    right_label = labels[:, occupied[-1]][white[:, occupied[-1]]][0]
    if left_label == right_label:
        raise EyeLocalizationError("left and right scans reached the same blob")
    lr, lc = _centroid(labels, left_label)
    rr, rc = _centroid(labels, right_label)
    return EyePair((lr + r0, lc), (rr + r0, rc))


def _round(x: float) -> int:
    return int(np.floor(x + 0.5))


def _clamped_rect(x0, y0, x1, y1, height, width, name):
    x0, y0 = max(x0, 0), max(y0, 0)
    x1, y1 = min(x1, width), min(y1, height)
    if x1 <= x0 or y1 <= y0:
        raise RegionError(f"{name} region is empty after clamping to the frame")
    return Rect(x0, y0, x1 - x0, y1 - y0)


def derive_regions(eyes: EyePair, geometry: RegionGeometry = RegionGeometry(),
                   height: int = FACE_HEIGHT, width: int = FACE_WIDTH) -> FaceRegions:
    """Brow, wrinkle and lips rectangles for a face of the given frame size.

    Brows are centred on each eye column; the wrinkle window spans the eye
    columns inclusively; the lips window is fixed.
    """
    g = geometry
    half_w = g.brow_width * width / 2.0
    brows = []
    for name, (row, col) in (("left_brow", eyes.left), ("right_brow", eyes.right)):
        # pixel c covers [c, c + 1); centre the window on the pixel centre
        brows.append(_clamped_rect(_round(col + 0.5 - half_w), _round(row - g.brow_top * height),
                                   _round(col + 0.5 + half_w), _round(row - g.brow_bottom * height),
                                   height, width, name))
    mean_row = (eyes.left[0] + eyes.right[0]) / 2.0
    wrinkle = _clamped_rect(_round(eyes.left[1]), _round(mean_row - g.wrinkle_top * height),
                            _round(eyes.right[1]) + 1, _round(mean_row - g.wrinkle_bottom * height),
                            height, width, "wrinkle")
    lips = _clamped_rect(0, g.lips_first_row - 1, width, g.lips_last_row, height, width, "lips")
    return FaceRegions(brows[0], brows[1], wrinkle, lips)
