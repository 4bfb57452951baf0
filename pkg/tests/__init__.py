"""Tests for twapprox."""
