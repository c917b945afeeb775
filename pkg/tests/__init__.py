"""Tests for cattaneo-layer."""
