"""Numerics for free boundary minimal disks and annuli in spherical-cap metrics on the unit ball."""

__version__ = "0.1.0"
