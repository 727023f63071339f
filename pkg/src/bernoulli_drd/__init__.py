"""Adaptive edge evaluation for feasible path identification."""
