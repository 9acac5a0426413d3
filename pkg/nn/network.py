"""
Dense feed-forward Q-network.

Hidden layers use ReLU (or tanh), the output layer is linear and has one unit
per action, so max_b Q(x', b) is a single forward pass. Weight matrices are
stored (out, in): one state maps as W @ x + b, a batch as X @ W.T + b.
"""

import copy
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from models.errors import InputError

ACTIVATIONS = ("relu", "tanh")


@dataclass
class QNetwork:
    """Q(theta; x, .) for every action at once"""
    layer_sizes: List[int]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: str = "relu"
    param_names: List[str] = field(init=False, repr=False)

    def __post_init__(self):
        self.layer_sizes = [int(n) for n in self.layer_sizes]
        if len(self.layer_sizes) < 2 or any(n < 1 for n in self.layer_sizes):
            raise InputError("layer_sizes needs at least an input and an output width, all >= 1")
        if self.activation not in ACTIVATIONS:
            raise InputError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise InputError("need one weight matrix and one bias vector per layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[i + 1], self.layer_sizes[i])
            if w.shape != expected or b.shape != (expected[0],):
                raise InputError(f"layer {i}: expected weight {expected} and bias ({expected[0]},), "
                                 f"got {w.shape} and {b.shape}")
        self.param_names = [f"layer{i}.{kind}" for i in range(len(self.weights))
                            for kind in ("weight", "bias")]

    @classmethod
    def initialize(cls, layer_sizes: Sequence[int], rng: np.random.Generator,
                   activation: str = "relu") -> "QNetwork":
        """He-uniform weights, zero biases"""
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            limit = np.sqrt(6.0 / fan_in)
            weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
            biases.append(np.zeros(fan_out))
        return cls(list(layer_sizes), weights, biases, activation)

    @classmethod
    def zeros(cls, layer_sizes: Sequence[int], activation: str = "relu") -> "QNetwork":
        weights = [np.zeros((o, i)) for i, o in zip(layer_sizes[:-1], layer_sizes[1:])]
        biases = [np.zeros(o) for o in layer_sizes[1:]]
        return cls(list(layer_sizes), weights, biases, activation)

    @property
    def state_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def num_actions(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> List[np.ndarray]:
        """Parameter arrays in the order weight0, bias0, weight1, ... (views, not copies)"""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.parameters())

    def predict(self, states: np.ndarray) -> np.ndarray:
        """Batch forward pass, (N, d) -> (N, |A|)"""
        outputs, _ = forward_batch(self, states)
        return outputs


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activate_grad(z: np.ndarray, a: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return (z > 0).astype(float)
    return 1.0 - a ** 2


def _as_batch(net: QNetwork, states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[None, :]
    if states.ndim != 2 or states.shape[1] != net.state_dim:
        raise InputError(f"expected states of dimension {net.state_dim}, got shape {states.shape}")
    return states


def forward_batch(net: QNetwork, states: np.ndarray) -> Tuple[np.ndarray, List[Tuple[np.ndarray, np.ndarray]]]:
    """Outputs for a batch plus the (pre-activation, activation) cache per layer"""
    a = _as_batch(net, states)
    cache = [(a, a)]
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w.T + b
        a = z if i == last else _activate(z, net.activation)
        cache.append((z, a))
    return a, cache


def forward(net: QNetwork, state: np.ndarray) -> np.ndarray:
    """Q(theta; x, a) for every action a"""
    state = np.asarray(state, dtype=float)
    if state.ndim != 1:
        raise InputError(f"forward takes a single state vector, got shape {state.shape}")
    outputs, _ = forward_batch(net, state)
    return outputs[0]


def backward(net: QNetwork, states: np.ndarray, output_grads: np.ndarray) -> List[np.ndarray]:
    """Gradients of sum_n <output_grads[n], Q(states[n])> w.r.t. every parameter"""
    outputs, cache = forward_batch(net, states)
    output_grads = np.asarray(output_grads, dtype=float)
    if output_grads.ndim == 1:
        output_grads = output_grads[None, :]
    if output_grads.shape != outputs.shape:
        raise InputError(f"output gradients of shape {output_grads.shape} do not match "
                         f"network outputs {outputs.shape}")
    grads: List[np.ndarray] = [np.empty(0)] * (2 * len(net.weights))
    delta = output_grads
    for i in range(len(net.weights) - 1, -1, -1):
        a_prev = cache[i][1]
        grads[2 * i] = delta.T @ a_prev
        grads[2 * i + 1] = delta.sum(axis=0)
        if i > 0:
            z_prev, act_prev = cache[i]
            delta = (delta @ net.weights[i]) * _activate_grad(z_prev, act_prev, net.activation)
    return grads


def sync_target(net: QNetwork) -> QNetwork:
    """Independent copy for use as the target network"""
    return copy.deepcopy(net)
