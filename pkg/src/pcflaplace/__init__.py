"""Laplace transform pairs built from parabolic cylinder functions."""
