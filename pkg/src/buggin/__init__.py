"""buggin: classify bug reports as intrinsic vs. non-intrinsic from text."""

__version__ = "0.1.0"
