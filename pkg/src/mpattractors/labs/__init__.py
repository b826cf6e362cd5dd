"""Concrete semigroups: a periodic reaction-diffusion lab and an elliptic lab."""
