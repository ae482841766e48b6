"""Tests for c2lab."""
