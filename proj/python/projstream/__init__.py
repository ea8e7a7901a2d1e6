"""Projected micro-cluster clustering for high dimensional data streams."""

from ._projstream import *  # noqa: F401,F403
