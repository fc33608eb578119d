"""Inverted pendulum on a cart, canonical constants, semi-implicit Euler.

Discrete actions {0: push left, 1: push right}. Reward +1 per step; the
episode ends when |x| > 2.4, |theta| > 12 degrees, or 500 steps are reached.
The integration step tau matches the 20 ms control period (50 Hz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import EpisodeDoneError

ACTION_LEFT = 0
ACTION_RIGHT = 1
N_ACTIONS = 2
OBS_DIM = 4


@dataclass(frozen=True)
class CartPoleParams:
    gravity: float = 9.8
    cart_mass: float = 1.0
    pole_mass: float = 0.1
    half_pole_length: float = 0.5
    force_mag: float = 10.0
    tau: float = 0.02  # seconds; equals the 50 Hz control period

    @property
    def total_mass(self) -> float:
        return self.cart_mass + self.pole_mass

    @property
    def polemass_length(self) -> float:
        return self.pole_mass * self.half_pole_length


@dataclass
class CartPoleState:
    x: float
    x_dot: float
    theta: float
    theta_dot: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.x_dot, self.theta, self.theta_dot], dtype=np.float64)


X_LIMIT = 2.4
THETA_LIMIT = 12.0 * math.pi / 180.0
MAX_STEPS = 500


def accelerations(state: CartPoleState, force: float, params: CartPoleParams) -> tuple[float, float]:
    """Closed-form (x_ddot, theta_ddot) for the canonical cart-pole."""
    cos_t = math.cos(state.theta)
    sin_t = math.sin(state.theta)
    temp = (force + params.polemass_length * state.theta_dot**2 * sin_t) / params.total_mass
    theta_acc = (params.gravity * sin_t - cos_t * temp) / (
        params.half_pole_length * (4.0 / 3.0 - params.pole_mass * cos_t**2 / params.total_mass)
    )
    x_acc = temp - params.polemass_length * theta_acc * cos_t / params.total_mass
    return x_acc, theta_acc


def dynamics_step(state: CartPoleState, force: float, params: CartPoleParams) -> CartPoleState:
    """One semi-implicit Euler step: velocities first, then positions."""
    x_acc, theta_acc = accelerations(state, force, params)
    x_dot = state.x_dot + params.tau * x_acc
    x = state.x + params.tau * x_dot
    theta_dot = state.theta_dot + params.tau * theta_acc
    theta = state.theta + params.tau * theta_dot
    return CartPoleState(x, x_dot, theta, theta_dot)


class CartPoleEnv:
    """Single-owner episode state machine."""

    name = "cartpole"
    n_actions = N_ACTIONS
    obs_dim = OBS_DIM
    default_action = ACTION_LEFT

    def __init__(self, params: CartPoleParams | None = None):
        self.params = params or CartPoleParams()
        self.state: CartPoleState | None = None
        self.step_count = 0
        self.done = True
        self.episode_return = 0.0

    def reset(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        vals = rng.uniform(-0.05, 0.05, size=4)
        self.state = CartPoleState(*vals)
        self.step_count = 0
        self.done = False
        self.episode_return = 0.0
        return self.observation()

    def observation(self) -> np.ndarray:
        return self.state.as_array()

    @property
    def success(self) -> bool:
        # Survived the full episode.
        return self.done and self.step_count >= MAX_STEPS

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        if self.done:
            raise EpisodeDoneError("cartpole episode already terminated")
        if action not in (ACTION_LEFT, ACTION_RIGHT):
            raise ValueError(f"invalid cartpole action: {action}")
        force = self.params.force_mag if action == ACTION_RIGHT else -self.params.force_mag
        self.state = dynamics_step(self.state, force, self.params)
        self.step_count += 1
        reward = 1.0
        self.episode_return += reward
        self.done = (
            abs(self.state.x) > X_LIMIT
            or abs(self.state.theta) > THETA_LIMIT
            or self.step_count >= MAX_STEPS
        )
        return self.observation(), reward, self.done

    def mechanical_energy(self) -> float:
        """Cart KE + pole KE (translation + rotation about CM) + pole PE."""
        p = self.params
        s = self.state
        m, half_len = p.pole_mass, p.half_pole_length
        cart_ke = 0.5 * p.cart_mass * s.x_dot**2
        pole_ke = (
            0.5 * m * s.x_dot**2
            + m * half_len * s.x_dot * s.theta_dot * math.cos(s.theta)
            + (2.0 / 3.0) * m * half_len**2 * s.theta_dot**2
        )
        pole_pe = m * p.gravity * half_len * math.cos(s.theta)
        return cart_ke + pole_ke + pole_pe
