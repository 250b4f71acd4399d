"""Whole-face feature extraction and classification."""
from __future__ import annotations

import numpy as np

from . import morphology as morph
from .classify import Decision, classify
from .config import Config
from .features import (ExtractionError, FeatureVector, brow_edges, brow_line, eyebrow_mean_mgii,
                       line_curvature, mouth_corners, mouth_profile, opening_from_peaks,
                       wrinkle_intensity)
from .locate import EyeLocalizationError, RegionError, derive_regions, eye_map, locate_eyes
from .raster import (FACE_HEIGHT, FACE_WIDTH, Rect, apply_elliptic_mask, crop, ellipse_mask,
                     resize_face, to_ycbcr)

DEFAULT_CONFIG = Config()


def prepare_face(img: np.ndarray, face_rect: Rect | None = None) -> np.ndarray:
    """Mask to the inscribed ellipse, crop to the face and resize to 381 x 281."""
    masked = apply_elliptic_mask(img, face_rect)
    if face_rect is not None:
        masked = crop(masked, face_rect)
    return resize_face(masked)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ExtractionError:
        raise
    except (EyeLocalizationError, RegionError, ValueError) as exc:
        raise ExtractionError(name, str(exc)) from exc


def extract_features(img: np.ndarray, cfg: Config = DEFAULT_CONFIG, face_rect: Rect | None = None,
                     trace: dict | None = None) -> FeatureVector:
    """Run every extractor on one face image.

    ``trace``, when given, is filled with the intermediate planes and
    measurements (used by ``explain``).
    """
    face = _stage("preprocess", prepare_face, img, face_rect)
    chroma = to_ycbcr(face)
    em = eye_map(chroma)
    eyes = _stage("locate_eyes", locate_eyes, em, cfg.eye_band, cfg.eye_threshold)
    regions = _stage("derive_regions", derive_regions, eyes, cfg.regions)

    lips = crop(chroma, regions.lips)
    profile = _stage("mouth_opening", mouth_profile, lips, cfg.mouth_open_radius, cfg.smooth_window,
                     cfg.smooth_passes, cfg.peak_fraction, cfg.peak_separation)
    mo = opening_from_peaks(profile["peaks"])

    # the black surround left by the face mask would otherwise be the darkest "corner"
    inside = ellipse_mask(FACE_HEIGHT, FACE_WIDTH, Rect(0, 0, FACE_WIDTH, FACE_HEIGHT))
    inside = morph.erode(inside, morph.disk_se(max(cfg.lip_dilate_radius, 1)))
    corners, cmap = _stage("mouth_corners", mouth_corners, lips, cfg.lip_dilate_radius,
                           crop(inside, regions.lips), return_map=True)

    open_se = morph.line_se(cfg.brow_open_length) if cfg.brow_open_length else None
    ebm, ebc, brow_trace = [], [], []
    for rect in (regions.left_brow, regions.right_brow):
        brow = crop(face, rect)
        ebm.append(_stage("eyebrow_mean_mgii", eyebrow_mean_mgii, brow, cfg.brow_gradient_radius,
                          cfg.mgii_k_sigma))
        edges = _stage("eyebrow_curvature_dcl", brow_edges, brow, cfg.brow_threshold, open_se)
        line = brow_line(edges)
        ebc.append(line_curvature(line))
        brow_trace.append((brow, edges, line))

    wrinkle = crop(chroma.y, regions.wrinkle)
    w = _stage("wrinkle_intensity", wrinkle_intensity, wrinkle, cfg.canny)

    fv = FeatureVector(mo=mo, lc=corners.lc, w=float(w), ebc=float(np.mean(ebc)),
                       ebm=float(np.mean(ebm)))
    if trace is not None:
        trace.update(face=face, chroma=chroma, eye_map=em, eyes=eyes, regions=regions, lips=lips,
                     mouth=profile, corners=corners, corner_map=cmap, brows=brow_trace,
                     wrinkle=wrinkle, features=fv)
    return fv


def classify_image(img: np.ndarray, method: str = "wmv", cfg: Config = DEFAULT_CONFIG,
                   face_rect: Rect | None = None) -> tuple[FeatureVector, Decision]:
    fv = extract_features(img, cfg, face_rect)
    return fv, classify(fv, method, cfg.rule_table(), cfg.weight_matrix())
