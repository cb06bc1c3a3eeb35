"""Feed-forward dueling Q-network with analytic gradients.

Tanh trunk, a scalar value head and an advantage head combined as
Q = V + A - mean(A); the mean subtraction removes the constant-shift
ambiguity between the two heads without changing the argmax. Training
minimizes the mean squared TD error on the combined Q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

FORMAT_VERSION = 1


@dataclass(eq=False)
class QNetworkParams:
    trunk_weights: list[np.ndarray]
    trunk_biases: list[np.ndarray]
    value_weight: np.ndarray    # (width, 1)
    value_bias: np.ndarray      # (1,)
    adv_weight: np.ndarray      # (width, n_actions)
    adv_bias: np.ndarray        # (n_actions,)

    @property
    def input_dim(self) -> int:
        return self.trunk_weights[0].shape[0]

    @property
    def n_actions(self) -> int:
        return self.adv_weight.shape[1]

    def tensors(self) -> list[np.ndarray]:
        """All parameter arrays in a fixed order."""
        out: list[np.ndarray] = []
        for w, b in zip(self.trunk_weights, self.trunk_biases):
            out.extend((w, b))
        out.extend((self.value_weight, self.value_bias, self.adv_weight, self.adv_bias))
        return out

    def clone(self) -> "QNetworkParams":
        return QNetworkParams(
            trunk_weights=[w.copy() for w in self.trunk_weights],
            trunk_biases=[b.copy() for b in self.trunk_biases],
            value_weight=self.value_weight.copy(),
            value_bias=self.value_bias.copy(),
            adv_weight=self.adv_weight.copy(),
            adv_bias=self.adv_bias.copy(),
        )

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(t)) for t in self.tensors())


def init_params(
    input_dim: int,
    hidden_sizes,
    n_actions: int,
    rng: np.random.Generator,
) -> QNetworkParams:
    """Xavier-uniform initialization for the tanh trunk and linear heads."""
    if not hidden_sizes:
        raise DomainError("at least one hidden layer is required")

    def xavier(fan_in, fan_out):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    dims = [input_dim, *hidden_sizes]
    trunk_w = [xavier(dims[i], dims[i + 1]) for i in range(len(dims) - 1)]
    trunk_b = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]
    width = dims[-1]
    return QNetworkParams(
        trunk_weights=trunk_w,
        trunk_biases=trunk_b,
        value_weight=xavier(width, 1),
        value_bias=np.zeros(1),
        adv_weight=xavier(width, n_actions),
        adv_bias=np.zeros(n_actions),
    )


def zeros_like_params(params: QNetworkParams) -> QNetworkParams:
    return QNetworkParams(
        trunk_weights=[np.zeros_like(w) for w in params.trunk_weights],
        trunk_biases=[np.zeros_like(b) for b in params.trunk_biases],
        value_weight=np.zeros_like(params.value_weight),
        value_bias=np.zeros_like(params.value_bias),
        adv_weight=np.zeros_like(params.adv_weight),
        adv_bias=np.zeros_like(params.adv_bias),
    )


def _forward_full(params: QNetworkParams, x: np.ndarray):
    activations = [x]
    h = x
    for w, b in zip(params.trunk_weights, params.trunk_biases):
        h = np.tanh(h @ w + b)
        activations.append(h)
    v = h @ params.value_weight + params.value_bias          # (B, 1)
    a = h @ params.adv_weight + params.adv_bias              # (B, n_actions)
    q = v + a - a.mean(axis=1, keepdims=True)
    return activations, v, a, q


def forward(params: QNetworkParams, encoding: np.ndarray):
    """Value, advantages and combined Q for one encoding or a batch."""
    x = np.asarray(encoding, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != params.input_dim:
        raise DomainError(
            f"encoding width {x.shape[1]} does not match input dim {params.input_dim}"
        )
    _, v, a, q = _forward_full(params, x)
    if single:
        return float(v[0, 0]), a[0], q[0]
    return v[:, 0], a, q


def backward(
    params: QNetworkParams,
    encodings: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
):
    """Gradient of the mean squared TD loss; returns (grads, loss).

    Loss = mean over the batch of 0.5 * (Q(s, a) - target)^2.
    """
    x = np.asarray(encodings, dtype=float)
    acts = np.asarray(actions, dtype=int)
    y = np.asarray(targets, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DomainError("batch must be a nonempty 2-D array")

    batch = x.shape[0]
    activations, v, a, q = _forward_full(params, x)
    picked = q[np.arange(batch), acts]
    residual = picked - y
    loss = 0.5 * float(residual @ residual) / batch

    d_q = np.zeros_like(q)
    d_q[np.arange(batch), acts] = residual / batch
    d_v = d_q.sum(axis=1, keepdims=True)
    d_a = d_q - d_q.sum(axis=1, keepdims=True) / params.n_actions

    grads = zeros_like_params(params)
    h_last = activations[-1]
    grads.value_weight[:] = h_last.T @ d_v
    grads.value_bias[:] = d_v.sum(axis=0)
    grads.adv_weight[:] = h_last.T @ d_a
    grads.adv_bias[:] = d_a.sum(axis=0)

    d_h = d_v @ params.value_weight.T + d_a @ params.adv_weight.T
    for layer in reversed(range(len(params.trunk_weights))):
        h_out = activations[layer + 1]
        d_pre = d_h * (1.0 - h_out * h_out)     # tanh'
        grads.trunk_weights[layer][:] = activations[layer].T @ d_pre
        grads.trunk_biases[layer][:] = d_pre.sum(axis=0)
        d_h = d_pre @ params.trunk_weights[layer].T
    return grads, loss


def global_grad_norm(grads: QNetworkParams) -> float:
    return float(np.sqrt(sum(float(np.sum(t * t)) for t in grads.tensors())))


def clip_gradients(grads: QNetworkParams, max_norm: float) -> float:
    """Scale all gradients in place to the norm cap; returns the pre-clip norm."""
    norm = global_grad_norm(grads)
    if norm > max_norm:
        scale = max_norm / norm
        for t in grads.tensors():
            t *= scale
    return norm


@dataclass(eq=False)
class AdamState:
    first_moments: list[np.ndarray]
    second_moments: list[np.ndarray]
    step: int = 0

    def clone(self) -> "AdamState":
        return AdamState(
            first_moments=[m.copy() for m in self.first_moments],
            second_moments=[v.copy() for v in self.second_moments],
            step=self.step,
        )


def init_adam(params: QNetworkParams) -> AdamState:
    return AdamState(
        first_moments=[np.zeros_like(t) for t in params.tensors()],
        second_moments=[np.zeros_like(t) for t in params.tensors()],
    )


def adam_step(
    params: QNetworkParams,
    grads: QNetworkParams,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> QNetworkParams:
    """Standard Adam update applied in place; returns the params."""
    state.step += 1
    bias1 = 1.0 - beta1**state.step
    bias2 = 1.0 - beta2**state.step
    for tensor, grad, m, v in zip(
        params.tensors(), grads.tensors(), state.first_moments, state.second_moments
    ):
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad
        tensor -= lr * (m / bias1) / (np.sqrt(v / bias2) + eps)
    return params


def save_params(path, params: QNetworkParams) -> None:
    """Checkpoint to a versioned npz tensor list."""
    payload = {
        "format_version": np.array(FORMAT_VERSION),
        "n_trunk_layers": np.array(len(params.trunk_weights)),
    }
    for i, (w, b) in enumerate(zip(params.trunk_weights, params.trunk_biases)):
        payload[f"trunk_w{i}"] = w
        payload[f"trunk_b{i}"] = b
    payload["value_w"] = params.value_weight
    payload["value_b"] = params.value_bias
    payload["adv_w"] = params.adv_weight
    payload["adv_b"] = params.adv_bias
    np.savez(path, **payload)


def load_params(path) -> QNetworkParams:
    with np.load(path) as data:
        version = int(data["format_version"])
        if version != FORMAT_VERSION:
            raise DomainError(f"unsupported checkpoint version {version}")
        layers = int(data["n_trunk_layers"])
        return QNetworkParams(
            trunk_weights=[data[f"trunk_w{i}"] for i in range(layers)],
            trunk_biases=[data[f"trunk_b{i}"] for i in range(layers)],
            value_weight=data["value_w"],
            value_bias=data["value_b"],
            adv_weight=data["adv_w"],
            adv_bias=data["adv_b"],
        )
