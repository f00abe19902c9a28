"""Small fully-connected network with hand-written gradients and Adam.

Forward is affine + activation per hidden layer with a linear output.
``backward`` returns the exact analytic gradient of ``sum(output * upstream)``
with respect to every parameter, so callers bake any loss scaling (e.g. a
1/batch factor) into ``upstream``. Gradients are checked against central
finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import DimensionMismatch

ACTIVATIONS = ("tanh", "relu")


def _act(z: np.ndarray, kind: str) -> np.ndarray:
    return np.tanh(z) if kind == "tanh" else np.maximum(z, 0.0)


def _act_grad(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    return (z > 0.0).astype(z.dtype)


class Mlp:
    """Feedforward net; ``layer_sizes`` runs input -> hidden... -> output."""

    def __init__(
        self,
        layer_sizes: list[int],
        activation: str = "tanh",
        seed: int | np.random.Generator = 0,
    ):
        if activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        if len(layer_sizes) < 2:
            raise ValueError("need at least input and output sizes")
        self.layer_sizes = list(layer_sizes)
        self.activation = activation
        rng = np.random.default_rng(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list[np.ndarray]:
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Accepts a single vector or a (batch, input_dim) matrix."""
        squeeze = np.asarray(x).ndim == 1
        out, _ = self._forward_cached(x)
        return out[0] if squeeze else out

    def _forward_cached(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.input_dim:
            raise DimensionMismatch(
                f"input has {x.shape[1]} features, net expects {self.input_dim}"
            )
        cache = [x]  # post-activation input of each layer
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            h = z if i == last else _act(z, self.activation)
            cache.append(z)
        return h, cache

    def backward(
        self, x: np.ndarray, upstream: np.ndarray
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        """Gradients [(dW, db), ...] of sum(output * upstream) over the batch."""
        x = np.asarray(x, dtype=float)
        upstream = np.asarray(upstream, dtype=float)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
            upstream = upstream[None, :]
        out, zs = self._forward_cached(x)
        if upstream.shape != out.shape:
            raise DimensionMismatch(
                f"upstream gradient shape {upstream.shape} != output shape {out.shape}"
            )
        # activations entering each layer: a[0]=x, a[i]=act(z_i) for hidden i
        acts = [x]
        for z in zs[1:-1]:
            acts.append(_act(z, self.activation))
        grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(self.weights)
        delta = upstream
        for i in range(len(self.weights) - 1, -1, -1):
            grads[i] = (acts[i].T @ delta, delta.sum(axis=0))
            if i > 0:
                delta = (delta @ self.weights[i].T) * _act_grad(zs[i], self.activation)
        return grads

    def copy(self) -> "Mlp":
        clone = Mlp(self.layer_sizes, self.activation)
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        return clone

    def load_from(self, other: "Mlp") -> None:
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]


@dataclass
class AdamState:
    """Adam moments for one Mlp; shapes mirror the net's parameters."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_net(cls, net: Mlp, lr: float) -> "AdamState":
        params = net.parameters()
        return cls(
            lr=lr,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def adam_step(net: Mlp, grads: list[tuple[np.ndarray, np.ndarray]], state: AdamState) -> None:
    """One in-place Adam update; ``grads`` are loss gradients (descent direction)."""
    flat: list[np.ndarray] = []
    for dw, db in grads:
        flat.extend((dw, db))
    params = net.parameters()
    state.t += 1
    correct1 = 1.0 - state.beta1**state.t
    correct2 = 1.0 - state.beta2**state.t
    for p, g, m, v in zip(params, flat, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.lr * (m / correct1) / (np.sqrt(v / correct2) + state.eps)
