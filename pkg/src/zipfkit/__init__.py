"""Rank-frequency analysis of words in texts and corpora."""

__version__ = "0.1.0"
