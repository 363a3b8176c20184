"""Deterministic bag-of-words baseline: multinomial Naive Bayes.

A GPU-free stand-in for heavyweight classifiers at desk scale.  Its score
is additive over tokens, which makes trigger effects exactly analyzable:
prepending a phrase shifts the class-score difference by precisely the
phrase tokens' summed log-likelihood ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .corpus import DataError, Label, LabeledDataset, Vocabulary, tokenize

__all__ = [
    "DEFAULT_ALPHA",
    "NBModel",
    "train_nb",
    "serialize_nb",
    "save_nb",
    "parse_nb",
    "load_nb",
]

DEFAULT_ALPHA = 1.0

_NB_MAGIC = "clueguard-nb-model"
_NB_VERSION = 1


@dataclass(frozen=True)
class NBModel:
    """Trained multinomial Naive Bayes over a count vocabulary.

    ``class_log_prior`` holds ln(N_c / N); ``token_log_likelihood`` maps
    (token, label) to ln of the Laplace-smoothed token probability.  Both
    exponentiate to proper distributions.
    """

    class_log_prior: dict[Label, float]
    token_log_likelihood: dict[tuple[str, Label], float]
    alpha: float
    vocab: Optional[Vocabulary] = None

    def score(self, text: str) -> dict[Label, float]:
        """Per-label log-scores; out-of-vocabulary tokens are ignored."""
        scores = dict(self.class_log_prior)
        for tok in tokenize(text):
            for label in Label:
                ll = self.token_log_likelihood.get((tok, label))
                if ll is not None:
                    scores[label] += ll
        return scores

    def predict(self, text: str) -> tuple[Label, dict[Label, float]]:
        """Argmax label and the per-label log-scores.

        Exact ties go to UNINFORMATIVE (conservative default).
        """
        scores = self.score(text)
        if scores[Label.INFORMATIVE] > scores[Label.UNINFORMATIVE]:
            return Label.INFORMATIVE, scores
        return Label.UNINFORMATIVE, scores

    def predict_labels(self, texts: Sequence[str]) -> list[Label]:
        return [self.predict(t)[0] for t in texts]


def train_nb(
    dataset: LabeledDataset, vocab: Vocabulary, alpha: float = DEFAULT_ALPHA
) -> NBModel:
    """Closed-form fit: priors from document proportions, likelihoods from
    Laplace-smoothed token counts.

    Requires both labels present and a non-empty vocabulary.
    """
    if alpha <= 0:
        raise DataError(f"alpha must be positive, got {alpha}")
    if len(vocab) == 0:
        raise DataError("empty vocabulary")
    doc_counts = dataset.label_counts()
    n_total = len(dataset)
    if not dataset.is_labeled:
        raise DataError("training requires a fully labeled dataset")
    if any(doc_counts[label] == 0 for label in Label):
        raise DataError("training requires documents of both labels")

    priors = {label: math.log(doc_counts[label] / n_total) for label in Label}
    v_size = len(vocab)
    loglik: dict[tuple[str, Label], float] = {}
    for label in Label:
        mass = sum(vocab.class_count(t, label) for t in vocab.terms)
        denom = mass + alpha * v_size
        for t in vocab.terms:
            loglik[(t, label)] = math.log((vocab.class_count(t, label) + alpha) / denom)
    return NBModel(
        class_log_prior=priors, token_log_likelihood=loglik, alpha=alpha, vocab=vocab
    )


def serialize_nb(model: NBModel) -> str:
    """Versioned text document with priors and per-token log-likelihoods."""
    lines = [f"{_NB_MAGIC} v{_NB_VERSION}", f"alpha\t{model.alpha!r}"]
    for label in Label:
        lines.append(f"prior\t{label.value}\t{model.class_log_prior[label]!r}")
    for (tok, label), ll in sorted(model.token_log_likelihood.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        lines.append(f"loglik\t{tok}\t{label.value}\t{ll!r}")
    return "\n".join(lines) + "\n"


def save_nb(model: NBModel, path: str | Path) -> None:
    Path(path).write_text(serialize_nb(model), encoding="utf-8")


def parse_nb(text: str) -> NBModel:
    """Reload a serialized model; the vocabulary reference is not persisted."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_NB_MAGIC):
        raise DataError("not a Naive Bayes model document")
    version = lines[0].removeprefix(_NB_MAGIC).strip()
    if version != f"v{_NB_VERSION}":
        raise DataError(f"unsupported model version {version!r}")
    alpha: Optional[float] = None
    priors: dict[Label, float] = {}
    loglik: dict[tuple[str, Label], float] = {}
    for ln in lines[1:]:
        if not ln:
            continue
        cols = ln.split("\t")
        if cols[0] == "alpha" and len(cols) == 2:
            alpha = float(cols[1])
        elif cols[0] == "prior" and len(cols) == 3:
            priors[Label(cols[1])] = float(cols[2])
        elif cols[0] == "loglik" and len(cols) == 4:
            loglik[(cols[1], Label(cols[2]))] = float(cols[3])
        else:
            raise DataError(f"malformed model record {ln!r}")
    if alpha is None or len(priors) != len(Label):
        raise DataError("model document is missing alpha or priors")
    return NBModel(class_log_prior=priors, token_log_likelihood=loglik, alpha=alpha)


def load_nb(path: str | Path) -> NBModel:
    return parse_nb(Path(path).read_text(encoding="utf-8"))
