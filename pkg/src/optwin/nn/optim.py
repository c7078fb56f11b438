"""Adam optimizer and global-norm gradient clipping."""

import numpy as np

from optwin.errors import DimensionError, NumericError

# Recurrent nets on drifting telemetry explode without clipping; fixed value.
GRAD_CLIP_NORM = 5.0


def clip_global_norm(grads, max_norm=GRAD_CLIP_NORM):
    """Scale all gradients in place so the global L2 norm is <= max_norm.

    Returns the pre-clip norm.
    """
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    norm = float(np.sqrt(total))
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


class Adam:
    """Bias-corrected Adam over a named parameter mapping.

    Moments are kept per parameter name and initialized to zero; ``step``
    increments by one per update.
    """

    def __init__(self, params, learning_rate=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8):
        if not (0.0 < beta1 < 1.0 and 0.0 < beta2 < 1.0):
            raise ValueError("betas must lie in (0, 1)")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def update(self, params, grads):
        """One Adam step, in place on ``params``."""
        self.step += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1**self.step
        c2 = 1.0 - b2**self.step
        for k, p in params.items():
            g = grads[k]
            if g.shape != p.shape:
                raise DimensionError(f"gradient shape mismatch for {k}")
            if not np.isfinite(g).all():
                raise NumericError(f"non-finite gradient for {k}")
            m = self.m[k]
            v = self.v[k]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= self.learning_rate * (m / c1) / (np.sqrt(v / c2) + self.epsilon)
