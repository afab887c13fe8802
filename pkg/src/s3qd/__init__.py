"""Desk-scale simulator of the S3 quantum double model."""

from s3qd import anyon, gates, group, lattice, ribbon, state

__all__ = ["group", "lattice", "state", "ribbon", "anyon", "gates"]

__version__ = "0.1.0"
