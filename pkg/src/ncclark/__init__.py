"""Aleksandrov-Clark theory on the Drury-Arveson space at finite truncation degree."""

__version__ = "0.1.0"
