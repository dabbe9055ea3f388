"""Non-real eigenvalues of magnetic Dirac operators near the thresholds +-m."""

__version__ = "0.1.0"
