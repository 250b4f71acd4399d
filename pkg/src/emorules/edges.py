"""Edge detectors, binarization and the 1-D signal helpers used on row profiles."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .raster import to_unit


@dataclass(frozen=True)
class CannyParams:
    """Hysteresis thresholds and blur width.

    With ``relative`` set (the default) the thresholds are fractions of the
    largest gradient magnitude in the blurred plane.
    """

    low_threshold: float = 0.1
    high_threshold: float = 0.25
    gaussian_sigma: float = 1.4
    relative: bool = True

    def __post_init__(self):
        if not 0 < self.low_threshold < self.high_threshold:
            raise ValueError(
                f"need 0 < low < high, got {self.low_threshold}, {self.high_threshold}")
        if self.gaussian_sigma < 0:
            raise ValueError("gaussian_sigma must be non-negative")


@dataclass(frozen=True)
class PeakSet:
    positions: list[int] = field(default_factory=list)
    heights: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.positions)


def sobel_components(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical 3x3 Sobel responses; border pixels are 0."""
    a = np.asarray(p, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 3 or a.shape[1] < 3:
        raise ValueError(f"Sobel needs a plane of at least 3x3, got {a.shape}")
    gx = np.zeros_like(a)
    gy = np.zeros_like(a)
    # rows: above / centre / below, columns: left / centre / right
    up, mid, dn = a[:-2], a[1:-1], a[2:]
    col_sum = lambda x: x[:, :-2] + 2.0 * x[:, 1:-1] + x[:, 2:]
    gy[1:-1, 1:-1] = col_sum(dn) - col_sum(up)
    vert = up + 2.0 * mid + dn
    gx[1:-1, 1:-1] = vert[:, 2:] - vert[:, :-2]
    return gx, gy


def sobel_magnitude(p: np.ndarray) -> np.ndarray:
    gx, gy = sobel_components(p)
    return np.hypot(gx, gy)


def _non_max_suppression(mag, gx, gy):
    # quantise gradient direction into 0, 45, 90, 135 degrees
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((angle + 22.5) / 45.0).astype(int)) % 4
    # neighbour offsets (drow, dcol) along the gradient for each sector
    steps = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    h, w = mag.shape
    padded = np.pad(mag, 1)
    keep = np.zeros_like(mag, dtype=bool)
    for s, (dr, dc) in steps.items():
        ahead = padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]
        behind = padded[1 - dr:1 - dr + h, 1 - dc:1 - dc + w]
        # strict on one side so a symmetric two-pixel ridge keeps exactly one pixel
        keep |= (sector == s) & (mag > behind) & (mag >= ahead)
    return np.where(keep, mag, 0.0)


def canny(p: np.ndarray, params: CannyParams = CannyParams()) -> np.ndarray:
    """Binary Canny edge map: blur, Sobel gradient, NMS, hysteresis."""
    a = to_unit(p)
    if a.ndim != 2 or a.shape[0] < 5 or a.shape[1] < 5:
        raise ValueError(f"Canny needs a plane of at least 5x5, got {a.shape}")
    if params.gaussian_sigma > 0:
        a = ndimage.gaussian_filter(a, params.gaussian_sigma, mode="nearest")
    gx, gy = sobel_components(a)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 0:
        return np.zeros(a.shape, dtype=bool)
    low, high = params.low_threshold, params.high_threshold
    if params.relative:
        low, high = low * peak, high * peak
    thin = _non_max_suppression(mag, gx, gy)
    weak = thin >= low
    strong = thin >= high
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        return np.zeros(a.shape, dtype=bool)
    anchored = np.zeros(count + 1, dtype=bool)
    anchored[np.unique(labels[strong])] = True
    anchored[0] = False
    return anchored[labels]


def binarize(p: np.ndarray, threshold: float = 0.5, dark_foreground: bool = True) -> np.ndarray:
    """Foreground mask after scaling samples to [0, 1].

    Dark-foreground marks samples below ``threshold``; otherwise samples at
    or above it.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    a = to_unit(p)
    return a < threshold if dark_foreground else a >= threshold


def smooth_1d(signal, window: int = 9, passes: int = 2) -> np.ndarray:
    """Centered moving average; edge samples average the part of the window that exists."""
    s = np.asarray(signal, dtype=np.float64)
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    if window > len(s):
        raise ValueError(f"window {window} exceeds signal length {len(s)}")
    half = window // 2
    n = len(s)
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, n)
    for _ in range(passes):
        csum = np.concatenate(([0.0], np.cumsum(s)))
        s = (csum[hi] - csum[lo]) / (hi - lo)
    return s


def _local_maxima(s: np.ndarray) -> list[int]:
    # interior maxima; a flat top counts once, at its middle sample
    out = []
    n = len(s)
    i = 1
    while i < n - 1:
        if s[i] > s[i - 1]:
            j = i
            while j + 1 < n and s[j + 1] == s[i]:
                j += 1
            if j + 1 < n and s[j + 1] < s[i]:
                out.append((i + j) // 2)
            i = j + 1
        else:
            i += 1
    return out


def find_peaks(signal, min_prominence_fraction: float = 0.2, min_separation: int = 10) -> PeakSet:
    """Local maxima at least ``min_prominence_fraction`` of the global maximum.

    Candidates are accepted tallest first; one that falls within
    ``min_separation`` samples of an accepted peak is dropped.
    """
    s = np.asarray(signal, dtype=np.float64)
    if s.size == 0:
        raise ValueError("empty signal")
    top = s.max()
    if top <= 0:
        return PeakSet()
    floor = min_prominence_fraction * top
    candidates = [i for i in _local_maxima(s) if s[i] >= floor and s[i] > 0]
    # tallest first; ties go to the earlier index
    candidates.sort(key=lambda i: (-s[i], i))
    accepted: list[int] = []
    for i in candidates:
        if all(abs(i - j) >= min_separation for j in accepted):
            accepted.append(i)
    accepted.sort()
    return PeakSet(accepted, [float(s[i]) for i in accepted])
