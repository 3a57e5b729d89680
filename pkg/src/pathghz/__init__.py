"""Path-encoded GHZ states from four-ring pair sources and a linear fan-out."""

__version__ = "0.1.0"
