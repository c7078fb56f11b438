"""Central finite-difference verification of analytic gradients."""

import numpy as np

from optwin.errors import PreconditionError


def gradient_check(
    model,
    inputs,
    targets,
    h=1e-5,
    loss_kind="mse",
    max_entries_per_array=None,
    rng=None,
):
    """Max relative error between analytic and numeric gradients.

    Per checked entry: |analytic - numeric| / max(|analytic|, |numeric|, 1e-10).
    With ``max_entries_per_array`` set, a random subset of entries of each
    parameter array is checked (rng required).
    """
    if not (1e-7 <= h <= 1e-4):
        raise PreconditionError("perturbation h must lie in [1e-7, 1e-4]")
    _, grads = model.loss_and_gradients(inputs, targets, loss_kind)
    analytic = {k: g.copy() for k, g in grads.items()}
    worst = 0.0
    for name, p in model.parameters().items():
        flat = p.reshape(-1)
        n = flat.size
        if max_entries_per_array is not None and n > max_entries_per_array:
            idx = rng.choice(n, size=max_entries_per_array, replace=False)
        else:
            idx = range(n)
        ga = analytic[name].reshape(-1)
        for i in idx:
            keep = flat[i]
            flat[i] = keep + h
            lo_hi = model.loss(inputs, targets, loss_kind)
            flat[i] = keep - h
            lo_lo = model.loss(inputs, targets, loss_kind)
            flat[i] = keep
            numeric = (lo_hi - lo_lo) / (2.0 * h)
            denom = max(abs(ga[i]), abs(numeric), 1e-10)
            worst = max(worst, abs(ga[i] - numeric) / denom)
    return worst
