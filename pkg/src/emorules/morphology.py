"""Flat morphological operators on tagged planes.

Dilation treats samples outside the plane as 0; erosion treats them as the
largest representable value (255, ``True`` or ``+inf``). With a structuring
element that contains its origin both policies reduce to "ignore what falls
outside", which keeps dilation/erosion duality exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StructuringElement:
    mask: np.ndarray
    origin: tuple[int, int]

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2 or not mask.any():
            raise ValueError("structuring element needs a non-empty 2-D mask")
        r, c = self.origin
        if not (0 <= r < mask.shape[0] and 0 <= c < mask.shape[1]):
            raise ValueError(f"origin {self.origin} outside a {mask.shape} mask")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "origin", (int(r), int(c)))

    def offsets(self) -> list[tuple[int, int]]:
        """(drow, dcol) of every true cell relative to the origin."""
        r0, c0 = self.origin
        return [(int(r) - r0, int(c) - c0) for r, c in zip(*np.nonzero(self.mask))]

    def reflect(self) -> "StructuringElement":
        h, w = self.mask.shape
        r0, c0 = self.origin
        return StructuringElement(self.mask[::-1, ::-1].copy(), (h - 1 - r0, w - 1 - c0))


def disk_se(radius: int) -> StructuringElement:
    """Euclidean disk: cells whose center lies within ``radius`` of the origin."""
    if radius < 1:
        raise ValueError(f"disk radius must be >= 1, got {radius}")
    r = np.arange(-radius, radius + 1)
    mask = r[:, None] ** 2 + r[None, :] ** 2 <= radius * radius
    return StructuringElement(mask, (radius, radius))


def line_se(length: int, horizontal: bool = True) -> StructuringElement:
    """Centered line segment of odd ``length``."""
    if length < 1 or length % 2 == 0:
        raise ValueError(f"line length must be odd and >= 1, got {length}")
    mask = np.ones((1, length) if horizontal else (length, 1), dtype=bool)
    half = length // 2
    return StructuringElement(mask, (0, half) if horizontal else (half, 0))


def _high_value(p: np.ndarray):
    if p.dtype == bool:
        return True
    if np.issubdtype(p.dtype, np.integer):
        return np.iinfo(p.dtype).max
    return np.inf


def _low_value(p: np.ndarray):
    return False if p.dtype == bool else 0


def _sweep(p: np.ndarray, shifts, pad_value, reduce):
    h, w = p.shape
    pad = max(max(abs(dr), abs(dc)) for dr, dc in shifts)
    padded = np.full((h + 2 * pad, w + 2 * pad), pad_value, dtype=p.dtype)
    padded[pad:pad + h, pad:pad + w] = p
    out = None
    for dr, dc in shifts:
        view = padded[pad + dr:pad + dr + h, pad + dc:pad + dc + w]
        out = view.copy() if out is None else reduce(out, view, out=out)
    return out


def dilate(p: np.ndarray, se: StructuringElement) -> np.ndarray:
    """out(x) = max over cells b of the element of p(x - b)."""
    shifts = [(-dr, -dc) for dr, dc in se.offsets()]
    return _sweep(p, shifts, _low_value(p), np.maximum)


def erode(p: np.ndarray, se: StructuringElement) -> np.ndarray:
    """out(x) = min over cells b of the element of p(x + b)."""
    return _sweep(p, se.offsets(), _high_value(p), np.minimum)


def opening(p: np.ndarray, se: StructuringElement) -> np.ndarray:
    return dilate(erode(p, se), se)


def closing(p: np.ndarray, se: StructuringElement) -> np.ndarray:
    return erode(dilate(p, se), se)


def gradient(p: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Morphological gradient, dilation minus erosion clipped at zero."""
    hi = dilate(p, se)
    lo = erode(p, se)
    if p.dtype == bool:
        return hi & ~lo
    if np.issubdtype(p.dtype, np.integer):
        return np.clip(hi.astype(np.int64) - lo, 0, None).astype(p.dtype)
    return np.maximum(hi - lo, 0)


def invert(p: np.ndarray) -> np.ndarray:
    if p.dtype == bool:
        return ~p
    if np.issubdtype(p.dtype, np.integer):
        return (np.iinfo(p.dtype).max - p).astype(p.dtype)
    return 1.0 - p
