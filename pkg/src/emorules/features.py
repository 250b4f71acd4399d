"""The five facial feature extractors.

mo   mouth opening, rows between the two lip-edge peaks (0 when closed)
lc   distance between the mouth corners in pixels
w    forehead wrinkle intensity, Canny edge-pixel count
ebc  eyebrow curvature, summed absolute slope of the brow line over its length
ebm  eyebrow mean position, mean bright-gradient row over window height
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import morphology as morph
from .edges import CannyParams, binarize, canny, find_peaks, smooth_1d, sobel_magnitude
from .raster import ChromaImage, to_gray, to_unit

FEATURES = ("mo", "lc", "w", "ebc", "ebm")


class ExtractionError(RuntimeError):
    """A pipeline stage could not produce its feature."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class FeatureVector:
    mo: float
    lc: float
    w: float
    ebc: float
    ebm: float

    def __post_init__(self):
        for name in FEATURES:
            if getattr(self, name) < 0:
                raise ValueError(f"feature {name} must be non-negative")
        if self.ebm > 1:
            raise ValueError("ebm must lie in [0, 1]")

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


# --- mouth opening ---------------------------------------------------------

def compute_n(lips: ChromaImage) -> float:
    """0.95 times mean(Cr^2) over mean(Cr/Cb), both in unit-interval chroma."""
    cr, cb = lips.unit()
    ratio = float(np.mean(cr / cb))
    # no red anywhere: the map is zero whatever n is
    return 0.95 * float(np.mean(cr ** 2)) / ratio if ratio > 0 else 0.0


def mouth_map_raw(lips: ChromaImage, n: float | None = None) -> np.ndarray:
    cr, cb = lips.unit()
    if n is None:
        n = compute_n(lips)
    return cr ** 2 * (cr ** 2 - n * cr / cb) ** 2


def mouth_map(lips: ChromaImage) -> np.ndarray:
    raw = mouth_map_raw(lips)
    top = raw.max()
    return raw / top if top > 0 else raw


def mouth_profile(lips: ChromaImage, open_radius: int = 2, window: int = 9, passes: int = 2,
                  peak_fraction: float = 0.2, peak_separation: int = 10) -> dict:
    """Every intermediate of the mouth-opening measurement."""
    if min(lips.shape) < 3 or lips.shape[0] < window:
        raise ExtractionError("mouth_opening", f"lips window {lips.shape} is too small")
    mm = mouth_map(lips)
    edges = sobel_magnitude(mm)
    if open_radius > 0:
        edges = morph.opening(edges, morph.disk_se(open_radius))
    rows = edges.sum(axis=1)
    smoothed = smooth_1d(rows, window, passes)
    peaks = find_peaks(smoothed, peak_fraction, peak_separation)
    return {"map": mm, "edges": edges, "rows": rows, "smoothed": smoothed, "peaks": peaks}


def opening_from_peaks(peaks) -> float:
    if len(peaks) < 2:
        return 0.0
    order = np.argsort(peaks.heights, kind="stable")[::-1][:2]
    a, b = (peaks.positions[i] for i in order)
    return float(abs(a - b))


def mouth_opening(lips: ChromaImage, **params) -> tuple[int, float]:
    """(peak count, rows between the two tallest row-profile peaks)."""
    peaks = mouth_profile(lips, **params)["peaks"]
    return len(peaks), opening_from_peaks(peaks)


# --- eyebrows ----------------------------------------------------------------

def mean_high_row(grad: np.ndarray, k_sigma: float = 1.0) -> float:
    """Mean row of above-(mean + k*std) samples per column, averaged over columns, over height."""
    g = np.asarray(grad, dtype=np.float64)
    height = g.shape[0]
    high = g > g.mean(axis=0) + k_sigma * g.std(axis=0)
    used = high.any(axis=0)
    if not used.any():
        raise ExtractionError("eyebrow_mean_mgii", "no high-intensity gradient in any column")
    rows = np.arange(height)[:, None]
    per_col = (rows * high).sum(axis=0)[used] / high.sum(axis=0)[used]
    return float(per_col.mean() / height)


def eyebrow_mean_mgii(brow: np.ndarray, gradient_radius: int = 1, k_sigma: float = 1.0) -> float:
    """Normalised mean eyebrow row from the morphological gradient of a gray brow window."""
    gray = to_gray(brow) if brow.ndim == 3 else brow
    grad = morph.gradient(gray, morph.disk_se(gradient_radius))
    return mean_high_row(grad, k_sigma)


def brow_line(edges: np.ndarray) -> np.ndarray:
    """Row of the first foreground pixel in each column, -1 where the column is empty."""
    fg = np.asarray(edges) > 0
    first = fg.argmax(axis=0)
    return np.where(fg.any(axis=0), first, -1)


def line_curvature(heights) -> float:
    """Sum of absolute differences between consecutive present points, over point count."""
    h = np.asarray(heights)
    h = h[h >= 0]
    if h.size < 2:
        raise ExtractionError("eyebrow_curvature_dcl", "brow line has fewer than two points")
    return float(np.abs(np.diff(h)).sum() / h.size)


def brow_edges(brow: np.ndarray, threshold: float = 0.5, open_se: morph.StructuringElement | None = None):
    gray = to_gray(brow) if brow.ndim == 3 else brow
    binary = binarize(gray, threshold, dark_foreground=True)
    edges = sobel_magnitude(binary)
    if open_se is not None:
        edges = morph.opening(edges, open_se)
    return edges


def eyebrow_curvature_dcl(brow: np.ndarray, threshold: float = 0.5,
                          open_se: morph.StructuringElement | None = None) -> float:
    """Normalised curvature of the line traced along the top edge of the brow."""
    if open_se is None:
        open_se = morph.line_se(3)
    return line_curvature(brow_line(brow_edges(brow, threshold, open_se)))


# --- mouth corners -----------------------------------------------------------

def corner_map(lips_gray: np.ndarray) -> np.ndarray:
    """(1 - g)^6 on unit-interval luminance; the darkest pixels dominate."""
    return (1.0 - to_unit(lips_gray)) ** 6


@dataclass(frozen=True)
class Corners:
    left: tuple[int, int]    # (row, col)
    right: tuple[int, int]
    lc: float


def find_corners(cmap: np.ndarray) -> Corners:
    top = cmap.max()
    if top <= 0:
        raise ExtractionError("mouth_corners", "corner map is identically zero")
    hit = cmap >= top / 2.0
    cols = np.nonzero(hit.any(axis=0))[0]
    lcol, rcol = int(cols[0]), int(cols[-1])
    lrow = int(np.argmax(hit[:, lcol]))
    rrow = int(np.argmax(hit[:, rcol]))
    lc = float(np.hypot(lrow - rrow, lcol - rcol))
    return Corners((lrow, lcol), (rrow, rcol), lc)


def mouth_corners(lips: ChromaImage, dilate_radius: int = 2, valid: np.ndarray | None = None,
                  return_map: bool = False):
    """Corner points and their distance from the dilated-luminance corner map.

    ``valid`` masks out pixels (such as the black surround left by the face
    mask) that must not compete for the darkest-point maximum.
    """
    gray = lips.y
    if dilate_radius > 0:
        gray = morph.dilate(gray, morph.disk_se(dilate_radius))
    cmap = corner_map(gray)
    if valid is not None:
        cmap = np.where(valid, cmap, 0.0)
    corners = find_corners(cmap)
    return (corners, cmap) if return_map else corners


# --- wrinkles ----------------------------------------------------------------

def wrinkle_intensity(wr: np.ndarray, params: CannyParams = CannyParams()) -> int:
    gray = to_gray(wr) if wr.ndim == 3 else wr
    return int(canny(gray, params).sum())
