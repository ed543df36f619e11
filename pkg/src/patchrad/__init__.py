"""Classical radiation from a moving planar dipole layer (patch potentials)."""

__version__ = "0.1.0"
