"""Differential-evolution tuning of defect predictors on PROMISE release data."""

__version__ = "0.1.0"
