"""Two-unit policy graph with a rule-based switch.

Exactly one unit is active per step. When a unit is marked remote, the
observation routed to it crosses its own impaired channel: the remote unit
acts on the newest delivered observation and the graph repeats its last
action while nothing new has arrived.
"""

from __future__ import annotations

import math
from typing import Callable

from ..shim import NetworkModel, NetworkShim
from ..trace import LatencyTracer
from ..util import mix64
from ..wire import Message, VectorObs, is_stale

CARTPOLE_SWITCH_DEG = 5.0
_SWITCH_RAD = math.radians(CARTPOLE_SWITCH_DEG)


class PolicyUnit:
    """Named wrapper pairing a unit role with its agent (policy + buffers)."""

    def __init__(self, name: str, agent):
        self.name = name
        self.agent = agent

    def begin_episode(self) -> None:
        self.agent.begin_episode()

    def act(self, obs, now_us: int = 0) -> int:
        return self.agent.act(obs, now_us=now_us)


def cartpole_switch(state_or_obs) -> int:
    """0 = stabiliser when |theta| exceeds 5 degrees, else 1 = recentring.

    Equality sits on the recentring side. The pole angle is component 2 of
    the observation vector.
    """
    theta = state_or_obs[2] if not hasattr(state_or_obs, "theta") else state_or_obs.theta
    return 0 if abs(theta) > _SWITCH_RAD else 1


def doorkey_switch(state) -> int:
    """0 = key-seeking until has_key, then 1 = goal-navigation."""
    return 1 if state.has_key else 0


class PolicyGraph:
    """Routes each step's observation to the active unit."""

    def __init__(self, units: tuple[PolicyUnit, PolicyUnit],
                 switch_fn: Callable[[object], int],
                 default_action: int = 0,
                 remote_unit: int | None = None,
                 inter_model: NetworkModel | None = None):
        if remote_unit is not None and inter_model is None:
            raise ValueError("remote unit needs an inter-unit network model")
        self.units = units
        self.switch_fn = switch_fn
        self.default_action = default_action
        self.remote_unit = remote_unit
        self.inter_model = inter_model
        self.inter_tracer = LatencyTracer()
        self.switch_log: list[int] = []
        self._shim: NetworkShim | None = None
        self._episode = 0

    def begin_episode(self) -> None:
        for unit in self.units:
            unit.begin_episode()
        self.switch_log = []
        self._last_action: int | None = None
        self._remote_obs = None
        self._last_remote_seq = -1
        self._seq = 0
        if self.inter_model is not None:
            self._shim = NetworkShim(
                self.inter_model, seed=mix64(self.inter_model.seed, "inter", self._episode)
            )
        self._episode += 1

    def act(self, obs, now_us: int = 0, state=None) -> int:
        active = self.switch_fn(state if state is not None else obs)
        self.switch_log.append(active)

        if active != self.remote_unit:
            action = self.units[active].act(obs, now_us=now_us)
        else:
            msg = Message(seq=self._seq, send_ts=now_us, body=VectorObs(tuple(map(float, obs))))
            self._seq += 1
            if not self._shim.submit(msg, now_us):
                self.inter_tracer.record_drop(msg.seq, now_us)
            for delivered in self._shim.poll_deliverable(now_us):
                if is_stale(delivered.message.seq, self._last_remote_seq):
                    continue
                self._last_remote_seq = delivered.message.seq
                self._remote_obs = delivered.message.body.values
                self.inter_tracer.record(
                    delivered.message.send_ts, delivered.delivered_us, delivered.message.seq
                )
            if self._remote_obs is None:
                return self._last_action if self._last_action is not None else self.default_action
            action = self.units[active].act(self._remote_obs, now_us=now_us)

        self._last_action = action
        return action

    def switch_count(self) -> int:
        return sum(1 for a, b in zip(self.switch_log, self.switch_log[1:]) if a != b)
