"""Temporal-context buffers that let a policy infer state under delay."""

from __future__ import annotations

import math

import numpy as np


class ShapeError(Exception):
    pass


def delay_steps(mean_latency_ms: float, period_ms: float) -> int:
    """Delay in control steps implied by a channel's mean latency: d = ceil(mean/period).

    The matching frame-stack depth is d + 1.
    """
    return math.ceil(mean_latency_ms / period_ms)


class FrameStackBuffer:
    """Ring of the last k observations, concatenated oldest-first, zero-padded."""

    def __init__(self, k: int, obs_dim: int):
        if k < 1:
            raise ValueError("stack depth must be >= 1")
        self.k = k
        self.obs_dim = obs_dim
        self._buf = np.zeros((k, obs_dim), dtype=np.float64)

    @property
    def output_dim(self) -> int:
        return self.k * self.obs_dim

    def reset(self) -> None:
        self._buf.fill(0.0)

    def push(self, obs: np.ndarray) -> np.ndarray:
        obs = np.asarray(obs, dtype=np.float64).ravel()
        if obs.shape[0] != self.obs_dim:
            raise ShapeError(f"expected obs dim {self.obs_dim}, got {obs.shape[0]}")
        self._buf[:-1] = self._buf[1:]
        self._buf[-1] = obs
        return self._buf.ravel().copy()

    def stacked(self) -> np.ndarray:
        return self._buf.ravel().copy()


class ActionHistoryBuffer:
    """Last h actions, one-hot encoded oldest-first, zero-padded.

    Tracks in-flight actions under delay; exposed for ablations, off by default.
    """

    def __init__(self, h: int, action_count: int):
        if h < 1:
            raise ValueError("history length must be >= 1")
        self.h = h
        self.action_count = action_count
        self._buf = np.zeros((h, action_count), dtype=np.float64)

    @property
    def output_dim(self) -> int:
        return self.h * self.action_count

    def reset(self) -> None:
        self._buf.fill(0.0)

    def push(self, action: int) -> np.ndarray:
        if not 0 <= action < self.action_count:
            raise ShapeError(f"action {action} outside [0, {self.action_count})")
        self._buf[:-1] = self._buf[1:]
        self._buf[-1] = 0.0
        self._buf[-1, action] = 1.0
        return self._buf.ravel().copy()

    def vector(self) -> np.ndarray:
        return self._buf.ravel().copy()
