"""Benchmark environments: steppable state machines behind the env service."""

from __future__ import annotations


class EpisodeDoneError(Exception):
    """Raised when stepping an episode that has already terminated."""


from .cartpole import CartPoleEnv, CartPoleParams, CartPoleState  # noqa: E402
from .doorkey import (  # noqa: E402
    Cell,
    DoorKeyEnv,
    DoorKeyState,
    render_egocentric,
)

__all__ = [
    "EpisodeDoneError",
    "CartPoleEnv",
    "CartPoleParams",
    "CartPoleState",
    "Cell",
    "DoorKeyEnv",
    "DoorKeyState",
    "render_egocentric",
]
