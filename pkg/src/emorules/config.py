"""Every tunable constant of the pipeline, loadable from JSON.

A config file only needs the keys it overrides, e.g.::

    {"thresholds": {"w": 180}, "canny": {"gaussian_sigma": 1.0}, "weights": "printed"}

``weights`` is ``"accuracy"`` (normalised accuracy table, the default), ``"printed"``
(printed preset) or a path to a JSON file holding either
``{"accuracy": {emotion: [EBM, LC, EBC, W, MO]}}`` or
``{"weights": {emotion: [EBM, LC, EBC, W, MO]}}``.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .classify import (DEFAULT_THRESHOLDS, EMOTIONS, WEIGHT_FEATURES, Emotion, RuleTable,
                       WeightMatrix, compute_weights, default_weights, printed_weights)
from .edges import CannyParams
from .locate import RegionGeometry


@dataclass(frozen=True)
class Config:
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    weights: str = "accuracy"
    lip_dilate_radius: int = 2
    mouth_open_radius: int = 2
    brow_gradient_radius: int = 1
    brow_open_length: int = 3
    brow_threshold: float = 0.5
    mgii_k_sigma: float = 1.0
    canny: CannyParams = field(default_factory=CannyParams)
    smooth_window: int = 9
    smooth_passes: int = 2
    peak_fraction: float = 0.2
    peak_separation: int = 10
    regions: RegionGeometry = field(default_factory=RegionGeometry)
    eye_band: tuple = (0.20, 0.55)
    eye_threshold: float = 0.8
    base_dir: str = "."

    def __post_init__(self):
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise ValueError("smooth_window must be odd and >= 1")
        if self.smooth_passes < 1:
            raise ValueError("smooth_passes must be >= 1")
        if not 0 <= self.peak_fraction <= 1:
            raise ValueError("peak_fraction must lie in [0, 1]")
        if self.peak_separation < 1:
            raise ValueError("peak_separation must be >= 1")
        if min(self.lip_dilate_radius, self.mouth_open_radius) < 0 or self.brow_gradient_radius < 1:
            raise ValueError("structuring-element radii out of range")
        if self.brow_open_length < 0 or (self.brow_open_length and self.brow_open_length % 2 == 0):
            raise ValueError("brow_open_length must be 0 (disabled) or odd")
        if not 0 < self.brow_threshold < 1 or not 0 < self.eye_threshold <= 1:
            raise ValueError("binarization thresholds must lie in (0, 1)")
        lo, hi = self.eye_band
        if not 0 <= lo < hi <= 1:
            raise ValueError("eye_band must satisfy 0 <= top < bottom <= 1")
        RuleTable(dict(self.thresholds))   # validates

    def rule_table(self) -> RuleTable:
        return RuleTable(dict(self.thresholds))

    def weight_matrix(self) -> WeightMatrix:
        if self.weights == "accuracy":
            return default_weights()
        if self.weights == "printed":
            return printed_weights()
        path = Path(self.weights)
        if not path.is_absolute():
            path = Path(self.base_dir) / path
        data = json.loads(path.read_text())
        key = "accuracy" if "accuracy" in data else "weights"
        table = {Emotion.parse(k): v for k, v in data[key].items()}
        if set(table) != set(EMOTIONS):
            raise ValueError(f"{path}: need rows for all five emotions")
        if key == "accuracy":
            return compute_weights(table)
        rows = {e: v if isinstance(v, dict) else dict(zip(WEIGHT_FEATURES, v)) for e, v in table.items()}
        return WeightMatrix(rows)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("base_dir")
        d["eye_band"] = list(self.eye_band)
        return d

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = ".") -> "Config":
        data = dict(data)
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "thresholds" in data:
            data["thresholds"] = {**DEFAULT_THRESHOLDS, **data["thresholds"]}
        if "canny" in data:
            data["canny"] = CannyParams(**data["canny"])
        if "regions" in data:
            data["regions"] = RegionGeometry(**data["regions"])
        if "eye_band" in data:
            data["eye_band"] = tuple(data["eye_band"])
        return cls(**data, base_dir=str(base_dir))

    @classmethod
    def load(cls, path) -> "Config":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base_dir=str(path.parent))
