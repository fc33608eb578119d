"""Fixed-rate agent-environment loop with impaired channels between the two.

The environment ticks at the control period and never blocks on the agent:
at each tick it emits its current observation into the obs channel, the agent
acts on the newest observation it has (reusing a stale one when nothing new
arrived), and the environment applies the newest delivered action, repeating
the previous one under loss or delay (zero-order hold). Before any action has
crossed the channel a fixed per-env default action is applied. This is what
makes latency cost reward: a lock-step loop would hide it.

Modes 1 and 2 run on a simulated clock advanced in control-period steps, so
identical configs and seeds give bit-identical episodes on any machine. With
zero impairment, mode 2 reduces tick-for-tick to the local loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..shim import NetworkModel, NetworkShim
from ..trace import LatencyTracer
from ..util import mix64
from ..wire import Action, GridObs, Message, VectorObs, is_stale


class Mode(Enum):
    LOCAL = "local"  # direct function calls, zero latency
    SIMNET = "simnet"  # shims on both channels, simulated clock
    EDGE_REAL = "edge_real"  # real sockets, wall clock (see service module)


class SimulatedClock:
    """Virtual time advanced only by the loop, in control-period increments."""

    def __init__(self):
        self.now_us = 0

    def advance(self, step_us: int) -> None:
        self.now_us += step_us


@dataclass
class LoopConfig:
    mode: Mode
    control_period_ms: float = 20.0
    obs_model: NetworkModel | None = None
    act_model: NetworkModel | None = None
    default_action: int = 0  # applied until the first action crosses the channel
    max_ticks: int = 100_000  # safety cap; envs terminate themselves well before

    def __post_init__(self):
        if self.mode == Mode.SIMNET:
            if self.obs_model is None or self.act_model is None:
                raise ValueError("simnet mode requires both obs and act channel models")
        elif self.mode == Mode.LOCAL:
            if self.obs_model is not None or self.act_model is not None:
                raise ValueError("local mode forbids channel models")

    @property
    def period_us(self) -> int:
        return int(round(self.control_period_ms * 1000.0))


@dataclass
class EpisodeResult:
    episode_return: float
    steps: int
    success: bool
    rewards: list[float]
    actions: list[int]  # action applied by the env at each tick
    applied_action_seq: list[int | None]  # channel seq of the held action, per tick
    agent_act_ticks: list[int]  # ticks at which the agent emitted an action
    act_emit_ticks: list[int]  # emission tick per action seq
    obs_tracer: LatencyTracer = field(default_factory=LatencyTracer)
    act_tracer: LatencyTracer = field(default_factory=LatencyTracer)

    @property
    def obs_latencies_ms(self) -> list[float]:
        return self.obs_tracer.delivered_latencies_ms

    @property
    def act_latencies_ms(self) -> list[float]:
        return self.act_tracer.delivered_latencies_ms

    @property
    def obs_drops(self) -> int:
        return self.obs_tracer.dropped_count

    @property
    def act_drops(self) -> int:
        return self.act_tracer.dropped_count


def obs_to_body(obs: np.ndarray) -> VectorObs | GridObs:
    arr = np.asarray(obs)
    if arr.dtype == np.uint8:
        return GridObs(arr.tobytes())
    return VectorObs(tuple(float(v) for v in arr.ravel()))


def body_to_obs(body: VectorObs | GridObs) -> np.ndarray:
    if isinstance(body, GridObs):
        return np.frombuffer(body.cells, dtype=np.uint8).reshape(7, 7, 3)
    return np.asarray(body.values, dtype=np.float64)


def _run_local(config: LoopConfig, env, agent, seed: int) -> EpisodeResult:
    obs = env.reset(seed)
    agent.begin_episode()
    period_us = config.period_us
    rewards: list[float] = []
    actions: list[int] = []
    ticks: list[int] = []
    for tick in range(config.max_ticks):
        action = agent.act(obs, now_us=tick * period_us, state=getattr(env, "state", None))
        obs, reward, done = env.step(action)
        rewards.append(reward)
        actions.append(action)
        ticks.append(tick)
        if done:
            break
    return EpisodeResult(
        episode_return=getattr(env, "episode_return", math.fsum(rewards)),
        steps=len(rewards),
        success=bool(getattr(env, "success", False)),
        rewards=rewards,
        actions=actions,
        applied_action_seq=list(range(len(actions))),
        agent_act_ticks=ticks,
        act_emit_ticks=list(ticks),
    )


def _run_simnet(config: LoopConfig, env, agent, seed: int) -> EpisodeResult:
    obs_shim = NetworkShim(config.obs_model, seed=mix64(config.obs_model.seed, seed, "obs"))
    act_shim = NetworkShim(config.act_model, seed=mix64(config.act_model.seed, seed, "act"))
    obs_tracer = LatencyTracer()
    act_tracer = LatencyTracer()
    clock = SimulatedClock()
    period_us = config.period_us

    obs = env.reset(seed)
    agent.begin_episode()

    obs_seq = 0
    act_seq = 0
    last_obs_seq = -1
    last_act_seq = -1
    newest_obs: np.ndarray | None = None
    held_action: int | None = None
    held_action_seq: int | None = None

    rewards: list[float] = []
    actions: list[int] = []
    applied_seq: list[int | None] = []
    agent_act_ticks: list[int] = []
    act_emit_ticks: list[int] = []

    for tick in range(config.max_ticks):
        now = clock.now_us

        # (1) environment emits its current observation
        msg = Message(seq=obs_seq, send_ts=now, body=obs_to_body(obs))
        obs_seq += 1
        if not obs_shim.submit(msg, now):
            obs_tracer.record_drop(msg.seq, now)

        # (2) agent consumes the newest non-stale delivered observation
        for delivered in obs_shim.poll_deliverable(now):
            if is_stale(delivered.message.seq, last_obs_seq):
                continue
            last_obs_seq = delivered.message.seq
            newest_obs = body_to_obs(delivered.message.body)
            obs_tracer.record(delivered.message.send_ts, delivered.delivered_us,
                              delivered.message.seq)

        # (3) the agent's action enters the act channel
        if newest_obs is not None:
            action = agent.act(newest_obs, now_us=now, state=None)
            agent_act_ticks.append(tick)
            act_emit_ticks.append(tick)
            amsg = Message(seq=act_seq, send_ts=now, body=Action(action))
            act_seq += 1
            if not act_shim.submit(amsg, now):
                act_tracer.record_drop(amsg.seq, now)

        # (4) environment applies the newest non-stale delivered action
        for delivered in act_shim.poll_deliverable(now):
            if is_stale(delivered.message.seq, last_act_seq):
                continue
            last_act_seq = delivered.message.seq
            held_action = delivered.message.body.action_id
            held_action_seq = delivered.message.seq
            act_tracer.record(delivered.message.send_ts, delivered.delivered_us,
                              delivered.message.seq)

        apply_action = held_action if held_action is not None else config.default_action
        applied_seq.append(held_action_seq)

        # (5) environment steps once per tick
        obs, reward, done = env.step(apply_action)
        rewards.append(reward)
        actions.append(apply_action)
        clock.advance(period_us)
        if done:
            break

    return EpisodeResult(
        episode_return=getattr(env, "episode_return", math.fsum(rewards)),
        steps=len(rewards),
        success=bool(getattr(env, "success", False)),
        rewards=rewards,
        actions=actions,
        applied_action_seq=applied_seq,
        agent_act_ticks=agent_act_ticks,
        act_emit_ticks=act_emit_ticks,
        obs_tracer=obs_tracer,
        act_tracer=act_tracer,
    )


def run_episode(config: LoopConfig, env, agent, seed: int) -> EpisodeResult:
    """Run one episode under the configured deployment mode."""
    if config.mode == Mode.LOCAL:
        return _run_local(config, env, agent, seed)
    if config.mode == Mode.SIMNET:
        return _run_simnet(config, env, agent, seed)
    raise ValueError("edge_real episodes run via the service module, not run_episode")


class EpisodeLoop:
    """Reusable (config, env) bundle; one run() call per episode."""

    def __init__(self, config: LoopConfig, env):
        self.config = config
        self.env = env

    def run(self, agent, seed: int) -> EpisodeResult:
        return run_episode(self.config, self.env, agent, seed)
