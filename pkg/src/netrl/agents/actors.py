"""Agent-side feature pipeline: obs encoding, stacking, and act() adapters.

Agents plug into the episode loop through two methods: begin_episode() and
act(obs, now_us, state). The loop hands `state` only in local mode (used by
oracle controllers); networked agents see observations alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .buffers import ActionHistoryBuffer, FrameStackBuffer
from .policy import PolicyMLP


def encode_cartpole(obs: np.ndarray) -> np.ndarray:
    return np.asarray(obs, dtype=np.float64)


def encode_doorkey(obs: np.ndarray) -> np.ndarray:
    # Flatten the 7x7x3 byte view; object ids max out at 5.
    return np.asarray(obs, dtype=np.float64).ravel() / 6.0


OBS_ENCODERS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "cartpole": encode_cartpole,
    "doorkey": encode_doorkey,
}


@dataclass(frozen=True)
class AgentSpec:
    """Shapes and temporal context for one policy's input pipeline."""

    env_name: str
    obs_dim: int  # encoded obs dim, pre-stacking
    n_actions: int
    stack_k: int = 1
    history_h: int = 0  # action-history length; 0 disables the buffer

    @property
    def input_dim(self) -> int:
        return self.stack_k * self.obs_dim + self.history_h * self.n_actions

    def encoder(self) -> Callable[[np.ndarray], np.ndarray]:
        return OBS_ENCODERS[self.env_name]


def spec_for_env(env_name: str, stack_k: int = 1, history_h: int = 0) -> AgentSpec:
    dims = {"cartpole": (4, 2), "doorkey": (7 * 7 * 3, 5)}
    obs_dim, n_actions = dims[env_name]
    return AgentSpec(env_name, obs_dim, n_actions, stack_k, history_h)


class PolicyAgent:
    """Wraps a policy with its temporal-context buffers for the episode loop."""

    def __init__(self, policy: PolicyMLP, spec: AgentSpec,
                 rng: np.random.Generator | None = None, greedy: bool = False):
        self.policy = policy
        self.spec = spec
        self.rng = rng
        self.greedy = greedy
        self._encode = spec.encoder()
        self.stack = FrameStackBuffer(spec.stack_k, spec.obs_dim)
        self.history = (
            ActionHistoryBuffer(spec.history_h, spec.n_actions) if spec.history_h else None
        )

    def begin_episode(self) -> None:
        self.stack.reset()
        if self.history is not None:
            self.history.reset()

    def features(self, obs) -> np.ndarray:
        stacked = self.stack.push(self._encode(obs))
        if self.history is None:
            return stacked
        return np.concatenate([stacked, self.history.vector()])

    def act(self, obs, now_us: int = 0, state=None) -> int:
        x = self.features(obs)
        if self.greedy:
            action = self.policy.greedy(x)
        else:
            action, _, _ = self.policy.sample(x, self.rng)
        if self.history is not None:
            self.history.push(action)
        return action


class RecordingPolicyAgent(PolicyAgent):
    """Sampling agent that records (input, action, logp, value) per act call."""

    def __init__(self, policy: PolicyMLP, spec: AgentSpec, rng: np.random.Generator):
        super().__init__(policy, spec, rng=rng, greedy=False)
        self.inputs: list[np.ndarray] = []
        self.actions: list[int] = []
        self.logps: list[float] = []
        self.values: list[float] = []

    def act(self, obs, now_us: int = 0, state=None) -> int:
        x = self.features(obs)
        action, logp, value = self.policy.sample(x, self.rng)
        if self.history is not None:
            self.history.push(action)
        self.inputs.append(x)
        self.actions.append(action)
        self.logps.append(logp)
        self.values.append(value)
        return action


class ScriptedAgent:
    """Adapter for full-state oracle controllers (local mode only)."""

    def __init__(self, controller: Callable):
        self._controller = controller

    def begin_episode(self) -> None:
        pass

    def act(self, obs, now_us: int = 0, state=None) -> int:
        if state is None:
            raise ValueError("scripted controllers need full state (local mode only)")
        return self._controller(state)
