"""Transformer model backend speaking the clueguard wire protocol v1."""

from .config import ALTERNATIVE_MODEL, DEFAULT_MODEL, BackendConfig
from .modeling import LABELS, ModelError, ModelRunner

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BackendConfig",
    "DEFAULT_MODEL",
    "ALTERNATIVE_MODEL",
    "ModelRunner",
    "ModelError",
    "LABELS",
]
