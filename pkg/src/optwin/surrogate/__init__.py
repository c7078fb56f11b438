"""Data-driven fiber channel surrogate (amplitude + phase branches)."""

from optwin.surrogate.dataset import (
    ChannelDataConfig,
    WaveformPair,
    build_dataset,
    load_pairs,
    save_pairs,
)
from optwin.surrogate.model import (
    SurrogateConfig,
    SurrogateMetrics,
    SurrogateModel,
    evaluate,
    predict_waveform,
    train_surrogate,
)

__all__ = [
    "WaveformPair",
    "ChannelDataConfig",
    "build_dataset",
    "save_pairs",
    "load_pairs",
    "SurrogateConfig",
    "SurrogateModel",
    "SurrogateMetrics",
    "train_surrogate",
    "predict_waveform",
    "evaluate",
]
