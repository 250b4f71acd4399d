"""Rule-based facial emotion recognition from hand-crafted chroma, edge and morphology features."""

from .classify import Decision, Emotion, RuleTable, WeightMatrix, classify
from .config import Config
from .features import ExtractionError, FeatureVector
from .pipeline import classify_image, extract_features

__all__ = [
    "Config", "Decision", "Emotion", "ExtractionError", "FeatureVector", "RuleTable",
    "WeightMatrix", "classify", "classify_image", "extract_features",
]
__version__ = "0.1.0"
