"""Image containers, YCbCr conversion and geometric preprocessing.

Planes are plain 2-D numpy arrays. The dtype is the tag: ``uint8`` planes
hold 8-bit samples, floating planes hold unit-interval reals, ``bool``
planes are binary masks. Color images are ``(H, W, 3)`` uint8 RGB arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

FACE_HEIGHT = 381
FACE_WIDTH = 281


class BoundsError(ValueError):
    """A rectangle does not fit inside the image it is applied to."""


@dataclass(frozen=True)
class Rect:
    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"degenerate rect {self}")

    @property
    def x1(self) -> int:
        return self.x0 + self.w

    @property
    def y1(self) -> int:
        return self.y0 + self.h

    def fits(self, height: int, width: int) -> bool:
        return self.x0 >= 0 and self.y0 >= 0 and self.x1 <= width and self.y1 <= height

    def compose(self, inner: "Rect") -> "Rect":
        """Express ``inner`` (relative to this rect) in parent coordinates."""
        return Rect(self.x0 + inner.x0, self.y0 + inner.y0, inner.w, inner.h)

    def mirrored(self, width: int) -> "Rect":
        return Rect(width - self.x1, self.y0, self.w, self.h)

    def as_list(self) -> list[int]:
        return [self.x0, self.y0, self.w, self.h]


@dataclass(frozen=True)
class ChromaImage:
    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray

    def __post_init__(self):
        if not (self.y.shape == self.cb.shape == self.cr.shape) or self.y.ndim != 2:
            raise ValueError("Y, Cb and Cr planes must share one 2-D shape")

    @property
    def shape(self) -> tuple[int, int]:
        return self.y.shape

    def unit(self) -> tuple[np.ndarray, np.ndarray]:
        """Cr and Cb scaled to [0, 1], with Cb clamped below at 1/255."""
        cr = self.cr.astype(np.float64) / 255.0
        cb = np.maximum(self.cb.astype(np.float64) / 255.0, 1.0 / 255.0)
        return cr, cb

    def fliplr(self) -> "ChromaImage":
        return ChromaImage(self.y[:, ::-1].copy(), self.cb[:, ::-1].copy(), self.cr[:, ::-1].copy())


def _round_u8(values: np.ndarray) -> np.ndarray:
    # half-up rounding so results do not depend on numpy's banker's rounding
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def to_ycbcr(img: np.ndarray) -> ChromaImage:
    rgb = np.asarray(img, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 + 0.564 * (b - y)
    cr = 128.0 + 0.713 * (r - y)
    return ChromaImage(_round_u8(y), _round_u8(cb), _round_u8(cr))


def ellipse_mask(height: int, width: int, face: Rect) -> np.ndarray:
    """Boolean mask of the axis-aligned ellipse inscribed in ``face``."""
    cy = face.y0 + (face.h - 1) / 2.0
    cx = face.x0 + (face.w - 1) / 2.0
    rows = (np.arange(height) - cy) / (face.h / 2.0)
    cols = (np.arange(width) - cx) / (face.w / 2.0)
    return rows[:, None] ** 2 + cols[None, :] ** 2 <= 1.0


def apply_elliptic_mask(img: np.ndarray, face: Rect | None = None) -> np.ndarray:
    """Black out every pixel outside the ellipse inscribed in ``face``.

    ``face`` defaults to the full frame.
    """
    height, width = img.shape[:2]
    if face is None:
        face = Rect(0, 0, width, height)
    if not face.fits(height, width):
        raise BoundsError(f"{face} does not fit a {height}x{width} image")
    out = img.copy()
    out[~ellipse_mask(height, width, face)] = 0
    return out


def _bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    in_h, in_w = img.shape[:2]
    src = img.astype(np.float64)
    # align-corners sampling: output corners land exactly on input corners
    ys = np.arange(out_h) * ((in_h - 1) / (out_h - 1)) if out_h > 1 else np.zeros(1)
    xs = np.arange(out_w) * ((in_w - 1) / (out_w - 1)) if out_w > 1 else np.zeros(1)
    y0 = np.minimum(np.floor(ys).astype(int), in_h - 1)
    x0 = np.minimum(np.floor(xs).astype(int), in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = ys - y0
    fx = xs - x0
    if src.ndim == 3:
        fy = fy[:, None, None]
        fx = fx[None, :, None]
    else:
        fy = fy[:, None]
        fx = fx[None, :]
    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bottom = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    return top * (1 - fy) + bottom * fy


def resize(img: np.ndarray, height: int, width: int) -> np.ndarray:
    if img.shape[:2] == (height, width):
        return img.copy()
    out = _bilinear(img, height, width)
    if img.dtype == np.uint8:
        return _round_u8(out)
    return out.astype(img.dtype)


def resize_face(img: np.ndarray) -> np.ndarray:
    """Bilinear resize to the fixed 381 x 281 face frame."""
    return resize(img, FACE_HEIGHT, FACE_WIDTH)


def crop(img, r: Rect):
    """Return a copy of the ``r`` sub-window of a plane, color image or ChromaImage."""
    if isinstance(img, ChromaImage):
        return ChromaImage(crop(img.y, r), crop(img.cb, r), crop(img.cr, r))
    height, width = img.shape[:2]
    if not r.fits(height, width):
        raise BoundsError(f"{r} does not fit a {height}x{width} image")
    return img[r.y0:r.y1, r.x0:r.x1].copy()


def to_gray(img: np.ndarray) -> np.ndarray:
    """Luminance plane (the Y channel) of an RGB image."""
    return to_ycbcr(img).y


def read_image(path) -> np.ndarray:
    """Read a PNG or binary PPM file into an RGB uint8 array."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def write_png(path, img: np.ndarray) -> None:
    """Write a uint8 plane or RGB image; float planes are scaled from [0, 1]."""
    arr = np.asarray(img)
    if arr.dtype == bool:
        arr = arr.astype(np.uint8) * 255
    elif arr.dtype != np.uint8:
        arr = _round_u8(np.clip(arr, 0.0, 1.0) * 255.0)
    Image.fromarray(arr).save(Path(path), format="PNG")


def to_unit(p: np.ndarray) -> np.ndarray:
    """View any tagged plane as float64 values in [0, 1]."""
    if p.dtype == np.uint8:
        return p.astype(np.float64) / 255.0
    if p.dtype == bool:
        return p.astype(np.float64)
    return np.asarray(p, dtype=np.float64)
