"""Geospatial diffusion analysis of dialect features."""

__version__ = "0.1.0"
