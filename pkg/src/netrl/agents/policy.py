"""Discrete-action MLP policy with a shared-trunk value head, numpy only.

Parameters live in one flat float64 vector (views per layer), which is also
the on-disk format: a text header with layer sizes and provenance tags,
followed by raw little-endian float64 bytes.
"""

from __future__ import annotations

import numpy as np

POLICY_HEADER_PREFIX = "netrl-policy v1"


class NumericsError(Exception):
    pass


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def _orthogonal(shape: tuple[int, int], gain: float, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=shape)
    u, _, vt = np.linalg.svd(a, full_matrices=False)
    q = u if u.shape == shape else vt
    return gain * q


class PolicyMLP:
    """Two-hidden-layer ReLU trunk, action logits head plus scalar value head."""

    def __init__(self, obs_dim: int, action_count: int, hidden: tuple[int, ...] = (64, 64),
                 seed: int = 0):
        if len(hidden) != 2:
            raise ValueError("policy trunk is two hidden layers")
        self.obs_dim = obs_dim
        self.action_count = action_count
        self.hidden = tuple(hidden)
        h1, h2 = self.hidden

        sizes = [
            (h1, obs_dim), (h1,),
            (h2, h1), (h2,),
            (action_count, h2), (action_count,),
            (1, h2), (1,),
        ]
        self.n_params = sum(int(np.prod(s)) for s in sizes)
        self.params = np.zeros(self.n_params, dtype=np.float64)
        self._views: list[np.ndarray] = []
        offset = 0
        for s in sizes:
            size = int(np.prod(s))
            self._views.append(self.params[offset:offset + size].reshape(s))
            offset += size
        (self.w1, self.b1, self.w2, self.b2,
         self.wp, self.bp, self.wv, self.bv) = self._views

        rng = np.random.default_rng(seed)
        self.w1[...] = _orthogonal(self.w1.shape, np.sqrt(2.0), rng)
        self.w2[...] = _orthogonal(self.w2.shape, np.sqrt(2.0), rng)
        self.wp[...] = _orthogonal(self.wp.shape, 0.01, rng)
        self.wv[...] = _orthogonal(self.wv.shape, 1.0, rng)

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.obs_dim, *self.hidden, self.action_count)

    def set_params(self, flat: np.ndarray) -> None:
        if flat.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} params, got {flat.shape}")
        self.params[...] = flat

    def forward_full(self, x: np.ndarray):
        """Batch forward returning trunk activations for backprop."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if not np.all(np.isfinite(x)):
            raise NumericsError("non-finite policy input")
        h1 = np.maximum(x @ self.w1.T + self.b1, 0.0)
        h2 = np.maximum(h1 @ self.w2.T + self.b2, 0.0)
        logits = h2 @ self.wp.T + self.bp
        values = (h2 @ self.wv.T + self.bv)[:, 0]
        return x, h1, h2, logits, values

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        _, _, _, logits, values = self.forward_full(x)
        return logits, values

    def distribution(self, x: np.ndarray) -> np.ndarray:
        logits, _ = self.forward(x)
        return softmax(logits)[0]

    def sample(self, x: np.ndarray, rng: np.random.Generator) -> tuple[int, float, float]:
        """Sample an action; returns (action, log-prob, value estimate)."""
        logits, values = self.forward(x)
        probs = softmax(logits)[0]
        action = int(rng.choice(self.action_count, p=probs))
        return action, float(np.log(probs[action])), float(values[0])

    def greedy(self, x: np.ndarray) -> int:
        logits, _ = self.forward(x)
        return int(np.argmax(logits[0]))

    def save(self, path, meta: dict[str, str] | None = None) -> None:
        fields = {"layers": ",".join(str(s) for s in self.layer_sizes)}
        fields.update(meta or {})
        header = POLICY_HEADER_PREFIX + "".join(f" {k}={v}" for k, v in fields.items())
        with open(path, "wb") as fh:
            fh.write(header.encode("utf-8") + b"\n")
            fh.write(self.params.astype("<f8").tobytes())


def load_policy(path) -> tuple[PolicyMLP, dict[str, str]]:
    with open(path, "rb") as fh:
        header = fh.readline().decode("utf-8").rstrip("\n")
        raw = fh.read()
    if not header.startswith(POLICY_HEADER_PREFIX):
        raise ValueError(f"not a policy file: {path}")
    meta = dict(part.split("=", 1) for part in header.split()[2:])
    sizes = tuple(int(s) for s in meta["layers"].split(","))
    obs_dim, h1, h2, n_act = sizes
    policy = PolicyMLP(obs_dim, n_act, hidden=(h1, h2))
    flat = np.frombuffer(raw, dtype="<f8")
    policy.set_params(flat.astype(np.float64))
    return policy, meta
