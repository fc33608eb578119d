"""Transparent middlebox that delays or drops messages per a network model.

Endpoints never see the shim: they submit messages and poll for whatever has
become deliverable. Delay and loss are drawn from one seeded stream per shim
instance (loss first, then delay), so identical (model, seed, submission
sequence) always reproduces the identical delivery schedule.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .wire import Message


@dataclass(frozen=True)
class SyntheticModel:
    """Parametric one-way channel: clipped-normal delay plus Bernoulli loss."""

    mu_ms: float
    sigma_ms: float
    p_loss: float
    seed: int = 0

    def __post_init__(self):
        if self.mu_ms < 0 or self.sigma_ms < 0:
            raise ValueError("mu_ms and sigma_ms must be >= 0")
        if not 0.0 <= self.p_loss <= 1.0:
            raise ValueError("p_loss must be in [0, 1]")


@dataclass(frozen=True)
class TraceModel:
    """Empirical channel: delays drawn uniformly with replacement from a recording."""

    delays_ms: tuple[float, ...]
    p_loss: float
    seed: int = 0

    def __post_init__(self):
        if not self.delays_ms:
            raise ValueError("delays_ms must be non-empty")
        if not 0.0 <= self.p_loss <= 1.0:
            raise ValueError("p_loss must be in [0, 1]")


NetworkModel = SyntheticModel | TraceModel

#: Zero-latency, zero-loss passthrough for parity checks.
ZERO_MODEL = SyntheticModel(mu_ms=0.0, sigma_ms=0.0, p_loss=0.0)


def sample_delay(model: NetworkModel, rng: np.random.Generator) -> float:
    """Draw one non-negative one-way delay in milliseconds."""
    if isinstance(model, SyntheticModel):
        return max(0.0, float(rng.normal(model.mu_ms, model.sigma_ms)))
    idx = int(rng.integers(0, len(model.delays_ms)))
    return model.delays_ms[idx]


def sample_loss(model: NetworkModel, rng: np.random.Generator) -> bool:
    """Draw one Bernoulli(p_loss) drop decision."""
    return bool(rng.random() < model.p_loss)


@dataclass(frozen=True)
class RealizedRecord:
    """What the shim actually did to one submitted message."""

    seq: int
    submit_us: int
    delay_ms: float | None  # None means dropped


class Delivered(NamedTuple):
    message: Message
    delivered_us: int  # when the message became available at the receiver


@dataclass
class _Entry:
    delivery_us: int
    arrival_order: int
    message: Message

    def __lt__(self, other: "_Entry") -> bool:
        return (self.delivery_us, self.arrival_order) < (other.delivery_us, other.arrival_order)


@dataclass
class NetworkShim:
    """One impaired channel/direction. Owned by a single execution context."""

    model: NetworkModel
    seed: int | None = None  # overrides model.seed when the caller derives per-episode seeds
    realized_log: list[RealizedRecord] = field(default_factory=list)

    def __post_init__(self):
        self._rng = np.random.default_rng(self.model.seed if self.seed is None else self.seed)
        self._queue: list[_Entry] = []
        self._arrival_counter = 0
        self.submitted = 0
        self.dropped = 0
        self.delivered = 0

    def submit(self, msg: Message, now_us: int) -> bool:
        """Subject one message to loss then delay. Returns False when dropped."""
        self.submitted += 1
        if sample_loss(self.model, self._rng):
            self.dropped += 1
            self.realized_log.append(RealizedRecord(msg.seq, now_us, None))
            return False
        delay_ms = sample_delay(self.model, self._rng)
        delivery_us = now_us + int(round(delay_ms * 1000.0))
        self.realized_log.append(RealizedRecord(msg.seq, now_us, delay_ms))
        heapq.heappush(self._queue, _Entry(delivery_us, self._arrival_counter, msg))
        self._arrival_counter += 1
        return True

    def poll_deliverable(self, now_us: int) -> list[Delivered]:
        """Remove and return everything due by `now_us`, in (delivery, arrival) order.

        Jitter may reorder relative to seq; staleness filtering is the
        receiver's job.
        """
        out: list[Delivered] = []
        while self._queue and self._queue[0].delivery_us <= now_us:
            entry = heapq.heappop(self._queue)
            out.append(Delivered(entry.message, entry.delivery_us))
        self.delivered += len(out)
        return out

    def pending(self) -> int:
        return len(self._queue)
