"""Gym-style bindings for the ctgraph environment."""

from .env import Box, CtGraphGymEnv, Discrete, make, resolve_spec

__version__ = "0.1.0"
