"""Cattaneo boundary-layer MHD simulator and verification harness."""

__version__ = "0.1.0"
