"""Dense float64 matrix primitives for the recurrent model and its tests.

Matrices are 2-D C-contiguous numpy float64 arrays; numpy supplies the
kernels. These wrappers pin down the contracts the rest of the package
relies on: shape errors that name both operands, finite results, a
sigmoid that never exponentiates a large positive argument, and
activation derivatives expressed in terms of the activation *output*.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import SeededRng

SIGMOID = "sigmoid"
TANH = "tanh"
LINEAR = "linear"

_KINDS = (SIGMOID, TANH, LINEAR)


def as_matrix(values) -> np.ndarray:
    """Coerce to a 2-D float64 C-order array."""
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with shape and finiteness checking."""
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(
            f"matmul: operands must be 2-D, got ndim {a.ndim} and {b.ndim}"
        )
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"matmul: incompatible shapes "
            f"({a.shape[0]}x{a.shape[1]}) @ ({b.shape[0]}x{b.shape[1]})"
        )
    with np.errstate(over="ignore"):
        out = a @ b
    if not np.isfinite(out).all():
        raise ValueError("matmul: result contains non-finite values")
    return out


def activation(kind: str, x: np.ndarray) -> np.ndarray:
    """Elementwise nonlinearity; input must be finite."""
    if kind not in _KINDS:
        raise ValueError(f"unknown activation kind {kind!r}")
    x = np.asarray(x, dtype=np.float64)
    if not np.isfinite(x).all():
        raise ValueError(f"activation({kind}): input contains non-finite values")
    if kind == SIGMOID:
        # branch form: exp() only ever sees non-positive arguments
        out = np.empty_like(x)
        pos = x >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        out[~pos] = ex / (1.0 + ex)
        return out
    if kind == TANH:
        return np.tanh(x)
    return x.copy()


def activation_grad(kind: str, y: np.ndarray) -> np.ndarray:
    """Derivative written in terms of the activation output y."""
    if kind == SIGMOID:
        return y * (1.0 - y)
    if kind == TANH:
        return 1.0 - y * y
    if kind == LINEAR:
        return np.ones_like(y)
    raise ValueError(f"unknown activation kind {kind!r}")


def glorot_init(rows: int, cols: int, rng: SeededRng) -> np.ndarray:
    """Uniform Glorot initialization, filled in row-major draw order."""
    if rows < 1 or cols < 1:
        raise ValueError(f"glorot_init: need rows, cols >= 1, got {rows}x{cols}")
    limit = math.sqrt(6.0 / (rows + cols))
    data = [rng.uniform(-limit, limit) for _ in range(rows * cols)]
    return np.array(data, dtype=np.float64).reshape(rows, cols)
