"""Conserved charges and positive-energy bounds for asymptotically AdS Einstein-Maxwell data."""

__version__ = "0.1.0"
