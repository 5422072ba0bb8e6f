"""Kinematic Theory Transform for 2D spatiotemporal trajectories."""
from ._backend import BACKEND

__version__ = "0.1.0"
