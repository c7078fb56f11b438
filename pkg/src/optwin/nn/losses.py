"""Scalar losses with gradients w.r.t. model outputs.

All losses reduce by the mean over every output element, so gradients
scale as 1/N and batch size does not change the learning-rate meaning.
``cross_entropy`` is binary cross-entropy on logits.
"""

import numpy as np

from optwin.errors import DimensionError

HUBER_DELTA = 1.0


def loss_and_grad(kind, outputs, targets):
    outputs = np.asarray(outputs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if outputs.shape != targets.shape:
        raise DimensionError(
            f"targets shaped {targets.shape} do not match outputs {outputs.shape}"
        )
    n = outputs.size
    diff = outputs - targets
    if kind == "mse":
        return float(np.mean(diff * diff)), 2.0 * diff / n
    if kind == "huber":
        a = np.abs(diff)
        quad = a <= HUBER_DELTA
        val = np.where(quad, 0.5 * diff * diff, HUBER_DELTA * (a - 0.5 * HUBER_DELTA))
        grad = np.where(quad, diff, HUBER_DELTA * np.sign(diff))
        return float(np.mean(val)), grad / n
    if kind == "cross_entropy":
        z = outputs
        # stable: max(z,0) - z*y + log(1+exp(-|z|))
        val = np.maximum(z, 0.0) - z * targets + np.log1p(np.exp(-np.abs(z)))
        sig = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        return float(np.mean(val)), (sig - targets) / n
    raise ValueError(f"unknown loss kind {kind!r}")
