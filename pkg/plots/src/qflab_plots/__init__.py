"""Figure rendering for qflab experiment artifacts."""

__version__ = "0.1.0"
