"""GOOSE anomaly detection: synthetic captures, feature extraction, two-view
autoencoders with EVT thresholds, and per-feature attributions."""

from ._goosead import (
    GooseFrame,
    GooseadError,
    __version__,
    decode_frame,
    detect,
    encode_frame,
    eval,
    extract,
    feature_names,
    fit_gpd,
    latent,
    metrics,
    pot_threshold,
    read_features,
    read_pcap,
    set_log_level,
    synth,
    train,
    write_pcap,
)

__all__ = [
    "GooseFrame",
    "GooseadError",
    "__version__",
    "decode_frame",
    "detect",
    "encode_frame",
    "eval",
    "extract",
    "feature_names",
    "fit_gpd",
    "latent",
    "metrics",
    "pot_threshold",
    "read_features",
    "read_pcap",
    "set_log_level",
    "synth",
    "train",
    "write_pcap",
]
