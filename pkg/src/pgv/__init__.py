"""Verification toolkit for class-2 finite p-groups given by pc presentations."""

from .presentation import (
    ConsistencyReport,
    PcPresentation,
    PresentationError,
    format_presentation,
    parse_presentation,
    validate_consistency,
)

__all__ = [
    "ConsistencyReport",
    "PcPresentation",
    "PresentationError",
    "format_presentation",
    "parse_presentation",
    "validate_consistency",
]
