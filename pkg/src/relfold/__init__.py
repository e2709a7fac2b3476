"""relfold: folded labeled graphs, small cancellation, and
Nielsen/Whitehead certificates for generic group presentations."""

__version__ = "0.1.0"
