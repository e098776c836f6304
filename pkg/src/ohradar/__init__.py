"""Radar range-profile detection: one-hot projection detector and CFAR baselines."""

from . import backend
from .core import (Boundary, DetectionSet, LabelSet, NormalizedWindow, RangeProfile, UsageError,
                   Window, WindowConfig, extract_window, normalize_window)

__version__ = "0.1.0"

__all__ = [
    "Boundary", "DetectionSet", "LabelSet", "NormalizedWindow", "RangeProfile", "UsageError",
    "Window", "WindowConfig", "backend", "extract_window", "normalize_window", "__version__",
]
