"""Stereo moon-illusion workbench: geometry, models, renderer, experiment engine."""

from ._core import (
    MOON_ANGULAR_DIAMETER_DEG,
    angular_expansion_deg,
    angular_size_deg,
    compare_models,
    displacement_for_magnification,
    expansion_curve,
    magnification,
    render,
    simulate,
    survey_proportions,
    vergence_rad,
)

__all__ = [
    "MOON_ANGULAR_DIAMETER_DEG",
    "angular_expansion_deg",
    "angular_size_deg",
    "compare_models",
    "displacement_for_magnification",
    "expansion_curve",
    "magnification",
    "render",
    "simulate",
    "survey_proportions",
    "vergence_rad",
]
