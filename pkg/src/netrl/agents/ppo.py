"""Clipped-surrogate policy-gradient trainer with GAE, numpy end to end.

The trainer is mode-agnostic: it drives any episode loop that runs an agent
callback and reports per-tick rewards, so the training regime differs only in
the channel between agent and environment. Batches are whole episodes
(episodes here are bounded), so GAE never needs a bootstrap value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..util import mix64
from .actors import AgentSpec, RecordingPolicyAgent
from .policy import PolicyMLP


class TrainingDiverged(Exception):
    def __init__(self, iteration: int, detail: str = ""):
        super().__init__(f"non-finite loss at iteration {iteration} {detail}".rstrip())
        self.iteration = iteration


@dataclass(frozen=True)
class TrainerConfig:
    rollout_steps: int = 2048
    epochs: int = 10
    minibatch_size: int = 64
    clip_ratio: float = 0.2
    discount: float = 0.99
    gae_lambda: float = 0.95
    learning_rate: float = 3e-4
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    total_steps: int = 150_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.clip_ratio < 1.0:
            raise ValueError("clip_ratio must be in (0, 1)")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must be in (0, 1]")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ValueError("gae_lambda must be in [0, 1]")


def compute_gae(rewards: np.ndarray, values: np.ndarray, discount: float,
                lam: float, last_value: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Generalized advantage estimates for one complete trajectory segment.

    `last_value` bootstraps a truncated segment; terminal episodes pass 0.
    """
    n = len(rewards)
    adv = np.zeros(n, dtype=np.float64)
    next_value = last_value
    running = 0.0
    for t in range(n - 1, -1, -1):
        delta = rewards[t] + discount * next_value - values[t]
        running = delta + discount * lam * running
        adv[t] = running
        next_value = values[t]
    return adv, adv + values


def ppo_loss_and_grad(policy: PolicyMLP, inputs: np.ndarray, actions: np.ndarray,
                      logp_old: np.ndarray, advantages: np.ndarray, returns: np.ndarray,
                      cfg: TrainerConfig) -> tuple[float, np.ndarray, dict]:
    """Total PPO loss and its analytic gradient w.r.t. the flat parameter vector."""
    x, h1, h2, logits, values = policy.forward_full(inputs)
    n = len(actions)

    zmax = logits.max(axis=1, keepdims=True)
    logz = zmax + np.log(np.exp(logits - zmax).sum(axis=1, keepdims=True))
    logp_all = logits - logz
    probs = np.exp(logp_all)
    idx = np.arange(n)
    logp = logp_all[idx, actions]

    ratio = np.exp(logp - logp_old)
    unclipped = ratio * advantages
    clipped = np.clip(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio) * advantages
    pg_loss = -np.minimum(unclipped, clipped).mean()

    v_err = values - returns
    v_loss = 0.5 * np.mean(v_err**2)

    entropy = -(probs * logp_all).sum(axis=1)
    loss = pg_loss + cfg.value_coef * v_loss - cfg.entropy_coef * entropy.mean()

    # Gradient flows through the ratio only where the unclipped branch is active.
    use_unclipped = unclipped <= clipped
    dlogp = np.where(use_unclipped, -advantages * ratio, 0.0) / n
    dlogits = dlogp[:, None] * (-probs)
    dlogits[idx, actions] += dlogp
    dlogits += (cfg.entropy_coef / n) * probs * (logp_all + entropy[:, None])
    dvalues = cfg.value_coef * v_err / n

    dh2 = dlogits @ policy.wp + dvalues[:, None] * policy.wv
    d_wp = dlogits.T @ h2
    d_bp = dlogits.sum(axis=0)
    d_wv = (dvalues[None, :] @ h2)
    d_bv = np.array([dvalues.sum()])
    dh2 *= h2 > 0
    d_w2 = dh2.T @ h1
    d_b2 = dh2.sum(axis=0)
    dh1 = dh2 @ policy.w2
    dh1 *= h1 > 0
    d_w1 = dh1.T @ x
    d_b1 = dh1.sum(axis=0)

    grad = np.concatenate([
        d_w1.ravel(), d_b1, d_w2.ravel(), d_b2,
        d_wp.ravel(), d_bp, d_wv.ravel(), d_bv,
    ])
    stats = {
        "pg_loss": float(pg_loss),
        "v_loss": float(v_loss),
        "entropy": float(entropy.mean()),
    }
    return float(loss), grad, stats


class Adam:
    def __init__(self, n_params: int, lr: float):
        self.lr = lr
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m = 0.9 * self.m + 0.1 * grad
        self.v = 0.999 * self.v + 0.001 * grad**2
        m_hat = self.m / (1.0 - 0.9**self.t)
        v_hat = self.v / (1.0 - 0.999**self.t)
        params -= self.lr * m_hat / (np.sqrt(v_hat) + 1e-8)


@dataclass
class LearningCurve:
    steps: list[int] = field(default_factory=list)
    mean_return: list[float] = field(default_factory=list)


def _episode_transitions(agent: RecordingPolicyAgent, result) -> tuple[np.ndarray, ...] | None:
    """Align recorded agent decisions with the env's per-tick rewards.

    The agent may start acting after the first env ticks (delayed first
    observation); rewards accrued before its first action are uncontrollable
    and excluded.
    """
    ticks = result.agent_act_ticks
    if not ticks:
        return None
    rewards = result.rewards
    rew = np.zeros(len(ticks), dtype=np.float64)
    for k, tick in enumerate(ticks):
        end = ticks[k + 1] if k + 1 < len(ticks) else len(rewards)
        rew[k] = sum(rewards[tick:end])
    return (
        np.asarray(agent.inputs, dtype=np.float64),
        np.asarray(agent.actions, dtype=np.int64),
        np.asarray(agent.logps, dtype=np.float64),
        np.asarray(agent.values, dtype=np.float64),
        rew,
    )


def train_policy(env_loop, config: TrainerConfig, spec: AgentSpec,
                 policy: PolicyMLP | None = None) -> tuple[PolicyMLP, LearningCurve]:
    """Train until total_steps agent decisions; deterministic under config.seed."""
    if policy is None:
        policy = PolicyMLP(spec.input_dim, spec.n_actions, seed=mix64("init", config.seed))
    optim = Adam(policy.n_params, config.learning_rate)
    rng = np.random.default_rng(mix64("shuffle", config.seed))
    curve = LearningCurve()

    steps_done = 0
    episode_idx = 0
    iteration = 0
    while steps_done < config.total_steps:
        batches = []
        ep_returns = []
        batch_steps = 0
        while batch_steps < config.rollout_steps:
            agent = RecordingPolicyAgent(
                policy, spec, rng=np.random.default_rng(mix64("act", config.seed, episode_idx))
            )
            result = env_loop.run(agent, mix64("train-ep", config.seed, episode_idx))
            episode_idx += 1
            transitions = _episode_transitions(agent, result)
            if transitions is None:
                continue
            batches.append(transitions)
            ep_returns.append(result.episode_return)
            batch_steps += len(transitions[1])

        inputs = np.concatenate([b[0] for b in batches])
        actions = np.concatenate([b[1] for b in batches])
        logp_old = np.concatenate([b[2] for b in batches])
        adv_parts, ret_parts = [], []
        for _, _, _, values, rewards in batches:
            adv, ret = compute_gae(rewards, values, config.discount, config.gae_lambda)
            adv_parts.append(adv)
            ret_parts.append(ret)
        advantages = np.concatenate(adv_parts)
        returns = np.concatenate(ret_parts)
        advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)

        n = len(actions)
        for _ in range(config.epochs):
            order = rng.permutation(n)
            for start in range(0, n, config.minibatch_size):
                mb = order[start:start + config.minibatch_size]
                loss, grad, _ = ppo_loss_and_grad(
                    policy, inputs[mb], actions[mb], logp_old[mb],
                    advantages[mb], returns[mb], config,
                )
                if not np.isfinite(loss):
                    raise TrainingDiverged(iteration)
                norm = np.linalg.norm(grad)
                if norm > config.max_grad_norm:
                    grad = grad * (config.max_grad_norm / norm)
                optim.step(policy.params, grad)

        steps_done += batch_steps
        iteration += 1
        curve.steps.append(steps_done)
        curve.mean_return.append(float(np.mean(ep_returns)))
    return policy, curve
