"""Policies, temporal-context buffers, the policy-gradient trainer,
scripted controllers, and the two-unit policy graph."""

from .buffers import ActionHistoryBuffer, FrameStackBuffer, ShapeError, delay_steps
from .policy import NumericsError, PolicyMLP, load_policy
from .ppo import TrainerConfig, TrainingDiverged, train_policy
from .scripted import scripted_doorkey_action
from .graph import PolicyGraph, PolicyUnit

__all__ = [
    "ActionHistoryBuffer",
    "FrameStackBuffer",
    "ShapeError",
    "delay_steps",
    "NumericsError",
    "PolicyMLP",
    "load_policy",
    "TrainerConfig",
    "TrainingDiverged",
    "train_policy",
    "scripted_doorkey_action",
    "PolicyGraph",
    "PolicyUnit",
]
