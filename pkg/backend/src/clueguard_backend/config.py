"""Backend configuration with the reference fine-tuning hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

# COVID-tweet pretrained model; bert-large-uncased is the general-domain
# alternative with the same size and architecture.
DEFAULT_MODEL = "digitalepidemiologylab/covid-twitter-bert"
ALTERNATIVE_MODEL = "bert-large-uncased"


@dataclass
class BackendConfig:
    """Model choice and training hyperparameters.

    The training defaults are the reference configuration: AdamW at 4e-5,
    batch size 32, max sequence length 70, 7 epochs, classifier dropout
    0.1 on the pooled first-token representation, best epoch selected by
    dev F1 when a dev set is supplied.
    """

    model: str = DEFAULT_MODEL
    classifier: Optional[str] = None  # fine-tuned checkpoint served by predict
    learning_rate: float = 4e-5
    batch_size: int = 32
    max_seq_length: int = 70
    epochs: int = 7
    classifier_dropout: float = 0.1
    device: str = "auto"

    def resolve_device(self) -> str:
        if self.device != "auto":
            return self.device
        try:
            import torch

            if torch.cuda.is_available():
                return "cuda"
        except ImportError:
            pass
        return "cpu"
