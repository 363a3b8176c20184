"""Transformer fine-tuning, prediction, and masked-LM fills.

One model is resident at a time: a new train replaces the previous one.
Sequence classification uses the pooled first-token representation with a
dropout layer and a single linear softmax head, fine-tuned end to end
with AdamW.  Labels map UNINFORMATIVE to 0 and INFORMATIVE to 1.
"""

from __future__ import annotations

import copy
import random
from typing import Callable, Optional

import torch

from .config import BackendConfig

LABELS = ("UNINFORMATIVE", "INFORMATIVE")
LABEL_TO_ID = {label: i for i, label in enumerate(LABELS)}

ProgressFn = Callable[[dict], None]


class ModelError(RuntimeError):
    """Raised for model-level failures; reported as ok:false responses."""


def _f1_informative(preds: list[str], golds: list[str]) -> float:
    tp = sum(1 for p, g in zip(preds, golds) if p == g == "INFORMATIVE")
    fp = sum(1 for p, g in zip(preds, golds) if p == "INFORMATIVE" != g)
    fn = sum(1 for p, g in zip(preds, golds) if g == "INFORMATIVE" != p)
    return 2 * tp / (2 * tp + fp + fn) if tp else 0.0


class ModelRunner:
    """Lazily loaded models plus the train/predict/fill_mask operations."""

    def __init__(self, config: BackendConfig) -> None:
        self.config = config
        self.device = torch.device(config.resolve_device())
        self._tokenizer = None
        self._mlm = None
        self._classifier = None
        self._classifier_id: Optional[str] = None
        self._train_count = 0

    @property
    def tokenizer(self):
        if self._tokenizer is None:
            from transformers import AutoTokenizer

            self._tokenizer = AutoTokenizer.from_pretrained(self.config.model)
        return self._tokenizer

    def _encode(self, texts: list[str]):
        return self.tokenizer(
            texts,
            padding=True,
            truncation=True,
            max_length=self.config.max_seq_length,
            return_tensors="pt",
        ).to(self.device)

    # -- fill_mask ---------------------------------------------------------

    def _mlm_model(self):
        if self._mlm is None:
            from transformers import AutoModelForMaskedLM

            self._mlm = AutoModelForMaskedLM.from_pretrained(self.config.model)
            self._mlm.to(self.device)
            self._mlm.eval()
        return self._mlm

    def fill_mask(self, text: str, top_k: int) -> list[tuple[str, float]]:
        """Ranked candidates for the first mask in ``text``.

        The wire format uses the literal token "[MASK]"; it is mapped to
        the tokenizer's own mask symbol before encoding.
        """
        if top_k < 1:
            raise ModelError(f"top_k must be positive, got {top_k}")
        mask_token = self.tokenizer.mask_token
        if mask_token is None:
            raise ModelError(f"model {self.config.model} has no mask token")
        prepared = text.replace("[MASK]", mask_token)
        model = self._mlm_model()
        encoded = self._encode([prepared])
        positions = (encoded["input_ids"][0] == self.tokenizer.mask_token_id).nonzero()
        if len(positions) == 0:
            raise ModelError("text contains no [MASK] token")
        with torch.no_grad():
            logits = model(**encoded).logits[0, positions[0, 0]]
        probs = torch.softmax(logits, dim=-1)
        top = torch.topk(probs, k=min(top_k, probs.shape[-1]))
        tokens = self.tokenizer.convert_ids_to_tokens(top.indices.tolist())
        return [
            (tok, float(score))
            for tok, score in zip(tokens, top.values.tolist())
            if tok is not None
        ]

    # -- train -------------------------------------------------------------

    def _fresh_classifier(self):
        from transformers import AutoConfig, AutoModelForSequenceClassification

        model_config = AutoConfig.from_pretrained(self.config.model, num_labels=2)
        if hasattr(model_config, "classifier_dropout"):
            model_config.classifier_dropout = self.config.classifier_dropout
        elif hasattr(model_config, "hidden_dropout_prob"):
            model_config.hidden_dropout_prob = self.config.classifier_dropout
        return AutoModelForSequenceClassification.from_pretrained(
            self.config.model, config=model_config
        )

    def train(
        self,
        examples: list[dict],
        dev: Optional[list[dict]] = None,
        params: Optional[dict] = None,
        on_progress: Optional[ProgressFn] = None,
    ) -> dict:
        """Fine-tune a fresh classification head; returns the model handle.

        ``params`` may override seed, lr, batch, max_len, epochs, dropout.
        With a dev set the best epoch by dev F1 is kept; otherwise the
        final epoch's weights are returned.
        """
        if not examples:
            raise ModelError("train payload contains no examples")
        params = params or {}
        seed = int(params.get("seed", 13))
        lr = float(params.get("lr", self.config.learning_rate))
        batch_size = int(params.get("batch", self.config.batch_size))
        max_len = int(params.get("max_len", self.config.max_seq_length))
        epochs = int(params.get("epochs", self.config.epochs))

        texts = [ex["text"] for ex in examples]
        try:
            labels = [LABEL_TO_ID[ex["label"]] for ex in examples]
        except KeyError as exc:
            raise ModelError(f"unknown label in train payload: {exc}") from None

        torch.manual_seed(seed)
        random.seed(seed)
        model = self._fresh_classifier()
        model.to(self.device)
        optimizer = torch.optim.AdamW(model.parameters(), lr=lr)

        dev_texts = [ex["text"] for ex in dev] if dev else []
        dev_golds = [ex["label"] for ex in dev] if dev else []

        best_state = None
        best_f1 = -1.0
        best_epoch = None
        order = list(range(len(texts)))
        shuffler = random.Random(seed)
        for epoch in range(1, epochs + 1):
            model.train()
            shuffler.shuffle(order)
            epoch_loss = 0.0
            n_batches = 0
            for start in range(0, len(order), batch_size):
                batch_idx = order[start : start + batch_size]
                encoded = self.tokenizer(
                    [texts[i] for i in batch_idx],
                    padding=True,
                    truncation=True,
                    max_length=max_len,
                    return_tensors="pt",
                ).to(self.device)
                target = torch.tensor([labels[i] for i in batch_idx], device=self.device)
                optimizer.zero_grad()
                loss = torch.nn.functional.cross_entropy(
                    model(**encoded).logits, target
                )
                loss.backward()
                optimizer.step()
                epoch_loss += float(loss.detach())
                n_batches += 1
                if on_progress is not None:
                    on_progress(
                        {"epoch": epoch, "batch": n_batches, "loss": float(loss.detach())}
                    )

            record = {"epoch": epoch, "mean_loss": epoch_loss / max(n_batches, 1)}
            if dev_texts:
                preds = self._predict_with(model, dev_texts)
                f1 = _f1_informative(preds, dev_golds)
                record["dev_f1"] = f1
                if f1 > best_f1:
                    best_f1 = f1
                    best_epoch = epoch
                    best_state = copy.deepcopy(
                        {k: v.cpu() for k, v in model.state_dict().items()}
                    )
            if on_progress is not None:
                on_progress(record)

        if best_state is not None:
            model.load_state_dict(best_state)
            model.to(self.device)

        model.eval()
        self._train_count += 1
        self._classifier = model
        self._classifier_id = f"model-{self._train_count}"
        result = {"model_id": self._classifier_id}
        if best_epoch is not None:
            result["best_epoch"] = best_epoch
            result["dev_f1"] = best_f1
        return result

    # -- predict -----------------------------------------------------------

    def _predict_with(self, model, texts: list[str]) -> list[str]:
        model.eval()
        preds: list[str] = []
        batch = self.config.batch_size
        with torch.no_grad():
            for start in range(0, len(texts), batch):
                encoded = self._encode(texts[start : start + batch])
                ids = model(**encoded).logits.argmax(dim=-1).tolist()
                preds.extend(LABELS[i] for i in ids)
        return preds

    def _serving_classifier(self, model_id: Optional[str]):
        if model_id is not None and model_id != self._classifier_id:
            raise ModelError(f"unknown model_id {model_id!r}")
        if self._classifier is None:
            if self.config.classifier is None:
                raise ModelError(
                    "no trained model; run train first or start the backend "
                    "with --classifier pointing at a fine-tuned checkpoint"
                )
            from transformers import AutoModelForSequenceClassification

            self._classifier = AutoModelForSequenceClassification.from_pretrained(
                self.config.classifier, num_labels=2
            )
            self._classifier.to(self.device)
            self._classifier.eval()
            self._classifier_id = "checkpoint"
        return self._classifier

    def predict(self, texts: list[str], model_id: Optional[str] = None) -> list[str]:
        """One label per text, in input order."""
        if not texts:
            return []
        model = self._serving_classifier(model_id)
        return self._predict_with(model, texts)
