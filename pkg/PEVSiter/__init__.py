"""Simulate and optimize PEV charging station deployments on road networks."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("PEVSiter")
except PackageNotFoundError:
    # package is not installed
    pass
