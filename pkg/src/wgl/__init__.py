"""Collaborative geometry laboratory: construction kernel, repository, classroom server."""

__version__ = "0.1.0"
