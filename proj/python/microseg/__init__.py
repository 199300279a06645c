"""Exposure and attack-graph robustness metrics for micro-segmented networks."""

from ._core import analyze, compare, synthesize, validate_network

__all__ = ["analyze", "compare", "synthesize", "validate_network"]
__version__ = "1.0.0"
