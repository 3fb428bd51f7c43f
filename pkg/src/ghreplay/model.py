"""Recurrent regression model with exact hand-derived backpropagation.

Architecture: one LSTM layer unrolled over the full input window from a
zero state, a tanh dense layer on the final hidden state, and a linear
output head (unbounded on purpose: a saturating head starves gradients
early in online training). Per step, with sigmoid gates i, f, o and tanh
candidate g:

    c_t = f_t * c_{t-1} + i_t * g_t
    h_t = o_t * tanh(c_t)

The training loss is the batch-mean MSE that evaluation also uses.
Gradients are derived by hand through the unrolled window (no autodiff);
the finite-difference suite checks every parameter entry. The optimizer
is Adam with bias correction.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import LINEAR, SIGMOID, TANH
from .rng import SeededRng


class TrainingDivergedError(RuntimeError):
    """Raised when a forward/backward pass produces a non-finite loss."""


@dataclass
class ModelConfig:
    input_dim: int = 5
    hidden_dim: int = 32
    dense_dim: int = 32
    output_dim: int = 2
    window_len: int = 250
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    grad_clip: float | None = None   # max global grad norm, None = off

    def validate(self) -> None:
        for name in ("input_dim", "hidden_dim", "dense_dim", "output_dim", "window_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"ModelConfig.{name} must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("ModelConfig.learning_rate must be > 0")
        if self.grad_clip is not None and not self.grad_clip > 0:
            raise ValueError("ModelConfig.grad_clip must be > 0 or None")


@dataclass
class ModelParams:
    """All weights. Gate matrices are (hidden x input), recurrent matrices
    (hidden x hidden), head weights (dense x hidden) and (output x dense)."""

    w_i: np.ndarray
    w_f: np.ndarray
    w_o: np.ndarray
    w_g: np.ndarray
    u_i: np.ndarray
    u_f: np.ndarray
    u_o: np.ndarray
    u_g: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_o: np.ndarray
    b_g: np.ndarray
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def items(self):
        for f in dataclasses.fields(self):
            yield f.name, getattr(self, f.name)

    def copy(self) -> "ModelParams":
        return ModelParams(**{name: arr.copy() for name, arr in self.items()})


# Gradients share the ModelParams layout: one array per parameter.
Gradients = ModelParams

PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(ModelParams))


def zeros_params(cfg: ModelConfig) -> ModelParams:
    h, d = cfg.hidden_dim, cfg.input_dim
    dn, out = cfg.dense_dim, cfg.output_dim
    z = np.zeros
    return ModelParams(
        w_i=z((h, d)), w_f=z((h, d)), w_o=z((h, d)), w_g=z((h, d)),
        u_i=z((h, h)), u_f=z((h, h)), u_o=z((h, h)), u_g=z((h, h)),
        b_i=z(h), b_f=z(h), b_o=z(h), b_g=z(h),
        w1=z((dn, h)), b1=z(dn), w2=z((out, dn)), b2=z(out),
    )


def init_model(cfg: ModelConfig, rng: SeededRng) -> ModelParams:
    """Glorot weights drawn in a fixed order; zero biases except forget
    gate biases at 1 so gradients flow through long windows from the start."""
    cfg.validate()
    h, d = cfg.hidden_dim, cfg.input_dim
    params = zeros_params(cfg)
    params.w_i = linalg.glorot_init(h, d, rng)
    params.w_f = linalg.glorot_init(h, d, rng)
    params.w_o = linalg.glorot_init(h, d, rng)
    params.w_g = linalg.glorot_init(h, d, rng)
    params.u_i = linalg.glorot_init(h, h, rng)
    params.u_f = linalg.glorot_init(h, h, rng)
    params.u_o = linalg.glorot_init(h, h, rng)
    params.u_g = linalg.glorot_init(h, h, rng)
    params.w1 = linalg.glorot_init(cfg.dense_dim, h, rng)
    params.w2 = linalg.glorot_init(cfg.output_dim, cfg.dense_dim, rng)
    params.b_f = np.ones(h)
    return params


@dataclass
class AdamState:
    m: ModelParams
    v: ModelParams
    t: int = 0


def init_adam(cfg: ModelConfig) -> AdamState:
    return AdamState(m=zeros_params(cfg), v=zeros_params(cfg))


@dataclass
class ForwardCache:
    """Per-step activations retained for backpropagation through time."""

    inputs: np.ndarray    # (B, T, D)
    i_s: np.ndarray       # (T, B, H) input gates
    f_s: np.ndarray       # forget gates
    o_s: np.ndarray       # output gates
    g_s: np.ndarray       # candidates
    c_s: np.ndarray       # cell states
    tc_s: np.ndarray      # tanh(cell)
    h_s: np.ndarray       # hidden states
    dense: np.ndarray     # (B, dense) tanh layer output
    outputs: np.ndarray   # (B, K) predictions


def _check_windows(params: ModelParams, inputs: np.ndarray) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 3:
        raise ValueError(f"expected windows of shape (batch, window_len, input_dim), got {inputs.shape}")
    if inputs.shape[2] != params.w_i.shape[1]:
        raise ValueError(
            f"window input_dim {inputs.shape[2]} does not match model input_dim {params.w_i.shape[1]}"
        )
    return inputs


def _forward_batch(params: ModelParams, inputs: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    """Full forward pass over a (B, T, D) batch, caching activations."""
    inputs = _check_windows(params, inputs)
    batch, steps, _ = inputs.shape
    hidden = params.u_i.shape[0]

    shape = (steps, batch, hidden)
    i_s = np.empty(shape); f_s = np.empty(shape); o_s = np.empty(shape)
    g_s = np.empty(shape); c_s = np.empty(shape); tc_s = np.empty(shape)
    h_s = np.empty(shape)

    w_iT, w_fT, w_oT, w_gT = params.w_i.T, params.w_f.T, params.w_o.T, params.w_g.T
    u_iT, u_fT, u_oT, u_gT = params.u_i.T, params.u_f.T, params.u_o.T, params.u_g.T

    h = np.zeros((batch, hidden))
    c = np.zeros((batch, hidden))
    for t in range(steps):
        x_t = inputs[:, t, :]
        i = linalg.activation(SIGMOID, linalg.matmul(x_t, w_iT) + linalg.matmul(h, u_iT) + params.b_i)
        f = linalg.activation(SIGMOID, linalg.matmul(x_t, w_fT) + linalg.matmul(h, u_fT) + params.b_f)
        o = linalg.activation(SIGMOID, linalg.matmul(x_t, w_oT) + linalg.matmul(h, u_oT) + params.b_o)
        g = linalg.activation(TANH, linalg.matmul(x_t, w_gT) + linalg.matmul(h, u_gT) + params.b_g)
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        i_s[t] = i; f_s[t] = f; o_s[t] = o; g_s[t] = g
        c_s[t] = c; tc_s[t] = tc; h_s[t] = h

    dense = linalg.activation(TANH, linalg.matmul(h, params.w1.T) + params.b1)
    outputs = linalg.matmul(dense, params.w2.T) + params.b2
    return outputs, ForwardCache(inputs, i_s, f_s, o_s, g_s, c_s, tc_s, h_s, dense, outputs)


def _forward_only(params: ModelParams, inputs: np.ndarray) -> np.ndarray:
    """Forward pass keeping only the running state (for prediction)."""
    inputs = _check_windows(params, inputs)
    batch, steps, _ = inputs.shape
    hidden = params.u_i.shape[0]
    w_iT, w_fT, w_oT, w_gT = params.w_i.T, params.w_f.T, params.w_o.T, params.w_g.T
    u_iT, u_fT, u_oT, u_gT = params.u_i.T, params.u_f.T, params.u_o.T, params.u_g.T
    h = np.zeros((batch, hidden))
    c = np.zeros((batch, hidden))
    for t in range(steps):
        x_t = inputs[:, t, :]
        i = linalg.activation(SIGMOID, linalg.matmul(x_t, w_iT) + linalg.matmul(h, u_iT) + params.b_i)
        f = linalg.activation(SIGMOID, linalg.matmul(x_t, w_fT) + linalg.matmul(h, u_fT) + params.b_f)
        o = linalg.activation(SIGMOID, linalg.matmul(x_t, w_oT) + linalg.matmul(h, u_oT) + params.b_o)
        g = linalg.activation(TANH, linalg.matmul(x_t, w_gT) + linalg.matmul(h, u_gT) + params.b_g)
        c = f * c + i * g
        h = o * np.tanh(c)
    dense = linalg.activation(TANH, linalg.matmul(h, params.w1.T) + params.b1)
    return linalg.matmul(dense, params.w2.T) + params.b2


def forward(params: ModelParams, window: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    """Predict one window (window_len, input_dim) -> ((output_dim,), cache)."""
    window = np.asarray(window, dtype=np.float64)
    if window.ndim != 2:
        raise ValueError(f"forward: expected a 2-D window, got shape {window.shape}")
    outputs, cache = _forward_batch(params, window[None, :, :])
    return outputs[0], cache


def predict_batch(params: ModelParams, windows: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Stateless predictions for a (B, T, D) stack of windows."""
    windows = _check_windows(params, windows)
    pieces = [
        _forward_only(params, windows[start : start + chunk])
        for start in range(0, windows.shape[0], chunk)
    ]
    return np.concatenate(pieces, axis=0)


def mse_loss(predictions: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Batch MSE: per-output column means, total defined as their mean."""
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape:
        raise ValueError(f"mse_loss: shape mismatch {predictions.shape} vs {targets.shape}")
    if predictions.ndim != 2 or predictions.shape[0] == 0:
        raise ValueError(f"mse_loss: need a nonempty (n, outputs) batch, got {predictions.shape}")
    err = predictions - targets
    per_output = np.mean(err * err, axis=0)
    return float(np.mean(per_output)), per_output


def backward(
    params: ModelParams,
    inputs: np.ndarray,
    targets: np.ndarray,
    origins: list | None = None,
) -> tuple[float, Gradients]:
    """Loss and exact gradients of the batch-mean MSE through the window.

    Backward recurrence per step (dh, dc carry into earlier steps):

        do = dh * tanh(c);        dc += dh * o * (1 - tanh(c)^2)
        di = dc * g;  df = dc * c_prev;  dg = dc * i
        dh_prev = sum_gate (d_pre_gate @ U_gate);  dc_prev = dc * f
    """
    if inputs.shape[0] == 0:
        raise ValueError("backward: empty batch")
    outputs, cache = _forward_batch(params, inputs)
    targets = np.asarray(targets, dtype=np.float64)

    if not np.isfinite(outputs).all():
        bad = np.where(~np.isfinite(outputs).all(axis=1))[0]
        detail = f" (samples {', '.join(str(origins[i]) for i in bad)})" if origins else ""
        raise TrainingDivergedError(f"non-finite predictions for batch rows {bad.tolist()}{detail}")
    loss, _ = mse_loss(outputs, targets)
    if not np.isfinite(loss):
        raise TrainingDivergedError("non-finite loss")

    batch, steps, _ = cache.inputs.shape
    n_out = targets.shape[1]
    grads = Gradients(**{name: np.zeros_like(arr) for name, arr in params.items()})

    # head
    d_out = 2.0 * (outputs - targets) / (batch * n_out)
    grads.w2 = d_out.T @ cache.dense
    grads.b2 = d_out.sum(axis=0)
    d_dense = d_out @ params.w2
    d_z1 = d_dense * linalg.activation_grad(TANH, cache.dense)
    grads.w1 = d_z1.T @ cache.h_s[steps - 1]
    grads.b1 = d_z1.sum(axis=0)
    dh = d_z1 @ params.w1

    # unrolled LSTM
    dc = np.zeros_like(dh)
    for t in range(steps - 1, -1, -1):
        i, f, o, g = cache.i_s[t], cache.f_s[t], cache.o_s[t], cache.g_s[t]
        tc = cache.tc_s[t]
        c_prev = cache.c_s[t - 1] if t > 0 else np.zeros_like(tc)
        h_prev = cache.h_s[t - 1] if t > 0 else np.zeros_like(tc)
        x_t = cache.inputs[:, t, :]

        da_o = dh * tc * linalg.activation_grad(SIGMOID, o)
        dc = dc + dh * o * linalg.activation_grad(TANH, tc)
        da_i = dc * g * linalg.activation_grad(SIGMOID, i)
        da_f = dc * c_prev * linalg.activation_grad(SIGMOID, f)
        da_g = dc * i * linalg.activation_grad(TANH, g)

        grads.w_i += da_i.T @ x_t
        grads.w_f += da_f.T @ x_t
        grads.w_o += da_o.T @ x_t
        grads.w_g += da_g.T @ x_t
        grads.u_i += da_i.T @ h_prev
        grads.u_f += da_f.T @ h_prev
        grads.u_o += da_o.T @ h_prev
        grads.u_g += da_g.T @ h_prev
        grads.b_i += da_i.sum(axis=0)
        grads.b_f += da_f.sum(axis=0)
        grads.b_o += da_o.sum(axis=0)
        grads.b_g += da_g.sum(axis=0)

        dh = da_i @ params.u_i + da_f @ params.u_f + da_o @ params.u_o + da_g @ params.u_g
        dc = dc * f

    return loss, grads


def clip_gradients(grads: Gradients, max_norm: float) -> float:
    """Scale all gradients so the global L2 norm is at most max_norm."""
    total = 0.0
    for _, g in grads.items():
        total += float(np.sum(g * g))
    norm = total ** 0.5
    if norm > max_norm:
        scale = max_norm / norm
        for _, g in grads.items():
            g *= scale
    return norm


def adam_step(params: ModelParams, grads: Gradients, adam: AdamState, cfg: ModelConfig) -> None:
    """One bias-corrected Adam update, in place."""
    adam.t += 1
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    bc1 = 1.0 - b1 ** adam.t
    bc2 = 1.0 - b2 ** adam.t
    for name, p in params.items():
        g = getattr(grads, name)
        m = getattr(adam.m, name)
        v = getattr(adam.v, name)
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= cfg.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + cfg.adam_epsilon)
