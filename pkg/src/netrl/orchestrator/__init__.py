"""Deployment-mode episode loops: local calls, simulated network, real sockets."""

from .loop import (
    EpisodeLoop,
    EpisodeResult,
    LoopConfig,
    Mode,
    SimulatedClock,
    run_episode,
)

__all__ = [
    "EpisodeLoop",
    "EpisodeResult",
    "LoopConfig",
    "Mode",
    "SimulatedClock",
    "run_episode",
]
