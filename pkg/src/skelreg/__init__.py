"""Skeleton regression: nonparametric regression on a graph summary of the covariates."""

__version__ = "0.1.0"
