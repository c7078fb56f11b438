"""Minimal float64 neural-network toolkit with explicit forward/backward.

No autodiff: every layer implements its own backward pass so the whole
core stays auditable against finite differences (see ``gradcheck``).
"""

from optwin.nn.layers import Dense, uniform_init
from optwin.nn.recurrent import GRUCell, LSTMCell, BiRecurrent
from optwin.nn.losses import loss_and_grad
from optwin.nn.model import Mlp, Network, SequenceRegressor
from optwin.nn.optim import GRAD_CLIP_NORM, Adam, clip_global_norm
from optwin.nn.gradcheck import gradient_check
from optwin.nn.checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Dense",
    "GRUCell",
    "LSTMCell",
    "BiRecurrent",
    "Mlp",
    "Network",
    "SequenceRegressor",
    "Adam",
    "GRAD_CLIP_NORM",
    "clip_global_norm",
    "loss_and_grad",
    "gradient_check",
    "save_checkpoint",
    "load_checkpoint",
    "uniform_init",
]
