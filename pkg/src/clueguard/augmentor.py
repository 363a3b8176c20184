"""Mask-and-refill data augmentation.

Each training example has every replacement-set token masked, masks are
refilled with substitute tokens drawn from outside the set, and the result
is emitted alongside the original with its label intact, doubling the
corpus.  The built-in filler samples class-conditional unigrams and is
fully deterministic; the backend filler delegates to a masked-language
model behind the wire protocol and falls back to the built-in draw when a
slot's candidates are exhausted.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, runtime_checkable

import numpy as np

from .corpus import (
    DataError,
    Example,
    Label,
    LabeledDataset,
    Vocabulary,
    token_spans,
)
from .feature_stats import ReplacementSet

__all__ = [
    "MASK_TOKEN",
    "MaskedExample",
    "Fill",
    "AugmentedExample",
    "MaskFiller",
    "ClassConditionalFiller",
    "BackendFiller",
    "AugmentError",
    "mask_example",
    "class_conditional_fill",
    "backend_fill",
    "augment_records",
    "augment_dataset",
    "write_provenance",
]

MASK_TOKEN = "[MASK]"


class AugmentError(DataError):
    """Raised when an example cannot be refilled."""


@dataclass(frozen=True)
class MaskedExample:
    """A tokenized example with replacement-set tokens blanked out.

    ``tokens`` holds lowercase source tokens with :data:`MASK_TOKEN` at the
    masked slots; ``spans`` are the character spans of each token in
    ``source_text`` so fills can be spliced back without touching the
    surrounding text.
    """

    source_id: str
    source_text: str
    tokens: tuple[str, ...]
    mask_positions: tuple[int, ...]
    spans: tuple[tuple[int, int], ...]
    label: Optional[Label]

    @property
    def masked_text(self) -> str:
        """Token sequence joined by single spaces, masks rendered literally."""
        return " ".join(self.tokens)


@dataclass(frozen=True)
class Fill:
    position: int
    token: str
    fallback: bool = False


@dataclass(frozen=True)
class AugmentedExample:
    """A refilled example carrying its provenance."""

    source_id: str
    text: str
    label: Optional[Label]
    fills: tuple[Fill, ...] = ()

    @property
    def mask_positions(self) -> tuple[int, ...]:
        return tuple(f.position for f in self.fills)


@runtime_checkable
class MaskFiller(Protocol):
    """Strategy for choosing substitute tokens for masked slots."""

    def fill(
        self, masked: MaskedExample, forbidden: frozenset[str], seed: int
    ) -> AugmentedExample: ...


def mask_example(example: Example, rset: ReplacementSet) -> MaskedExample:
    """Replace every replacement-set token of the example with the mask.

    All occurrences are masked, not just the first; matching is on the
    lowercase token.  Zero masks is a valid outcome.
    """
    if len(rset) == 0:
        raise DataError("replacement set is empty")
    forbidden = rset.tokens
    spans = token_spans(example.text)
    tokens: list[str] = []
    positions: list[int] = []
    for i, (start, end) in enumerate(spans):
        tok = example.text[start:end].lower()
        if tok in forbidden:
            tokens.append(MASK_TOKEN)
            positions.append(i)
        else:
            tokens.append(tok)
    return MaskedExample(
        source_id=example.id,
        source_text=example.text,
        tokens=tuple(tokens),
        mask_positions=tuple(positions),
        spans=tuple(spans),
        label=example.label,
    )


def _example_rng(seed: int, source_id: str) -> np.random.Generator:
    # Randomness is keyed on (seed, source id) so per-example work can run
    # in any order without changing results.
    digest = hashlib.sha256(f"{seed}\x1f{source_id}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:16], "big"))


def _class_candidates(
    vocab: Vocabulary, label: Label, forbidden: frozenset[str]
) -> tuple[list[str], np.ndarray]:
    cands = sorted(
        t for t in vocab.terms if t not in forbidden and vocab.class_count(t, label) > 0
    )
    weights = np.array([vocab.class_count(t, label) for t in cands], dtype=np.float64)
    return cands, weights


def _splice(masked: MaskedExample, fills: list[Fill]) -> str:
    text = masked.source_text
    for f in sorted(fills, key=lambda f: f.position, reverse=True):
        start, end = masked.spans[f.position]
        text = text[:start] + f.token + text[end:]
    return text


def class_conditional_fill(
    masked: MaskedExample,
    vocab: Vocabulary,
    forbidden: frozenset[str],
    seed: int,
) -> AugmentedExample:
    """Fill each mask with an independent draw from the label-conditional
    unigram distribution restricted to tokens outside ``forbidden``.

    Deterministic: identical inputs and seed give identical output.
    """
    if not masked.mask_positions:
        return AugmentedExample(
            source_id=masked.source_id, text=masked.source_text, label=masked.label
        )
    if masked.label is None:
        raise AugmentError(f"example {masked.source_id} is unlabeled")
    cands, weights = _class_candidates(vocab, masked.label, forbidden)
    if not cands:
        raise AugmentError(
            f"example {masked.source_id}: no eligible fill candidate outside the "
            f"replacement set for label {masked.label}"
        )
    rng = _example_rng(seed, masked.source_id)
    probs = weights / weights.sum()
    fills = [
        Fill(position=pos, token=cands[int(rng.choice(len(cands), p=probs))])
        for pos in masked.mask_positions
    ]
    return AugmentedExample(
        source_id=masked.source_id,
        text=_splice(masked, fills),
        label=masked.label,
        fills=tuple(fills),
    )


def _eligible(candidate: str, forbidden: frozenset[str]) -> Optional[str]:
    """Normalize a backend candidate; None when it cannot be used.

    Rejects empty strings, subword fragments (``##``-prefixed), bracketed
    special tokens, anything not purely alphanumeric, and forbidden tokens.
    """
    tok = candidate.strip().lower()
    if not tok or tok.startswith("##"):
        return None
    if tok.startswith("[") or not tok.isalnum():
        return None
    if tok in forbidden:
        return None
    return tok


def backend_fill(
    masked: MaskedExample,
    backend,
    forbidden: frozenset[str],
    top_k: int = 10,
    vocab: Optional[Vocabulary] = None,
    seed: int = 0,
) -> AugmentedExample:
    """Fill masks left to right with masked-language-model candidates.

    After each fill the remaining masked text is re-sent to the backend, so
    later slots see earlier choices.  Per slot, the first of the backend's
    ranked candidates that is alphanumeric, not a special or subword
    fragment, and outside ``forbidden`` is chosen; if none qualifies the
    slot falls back to the class-conditional draw (requires ``vocab``) and
    the fill is flagged.
    """
    if not masked.mask_positions:
        return AugmentedExample(
            source_id=masked.source_id, text=masked.source_text, label=masked.label
        )
    tokens = list(masked.tokens)
    fills: list[Fill] = []
    rng: Optional[np.random.Generator] = None
    for pos in masked.mask_positions:
        candidates = backend.fill_mask(" ".join(tokens), top_k=top_k)
        chosen: Optional[str] = None
        for cand, _score in candidates:
            tok = _eligible(cand, forbidden)
            if tok is not None:
                chosen = tok
                break
        if chosen is None:
            if vocab is None or masked.label is None:
                raise AugmentError(
                    f"example {masked.source_id}: backend offered no eligible "
                    f"candidate and no fallback vocabulary is available"
                )
            cands, weights = _class_candidates(vocab, masked.label, forbidden)
            if not cands:
                raise AugmentError(
                    f"example {masked.source_id}: no eligible fill candidate"
                )
            if rng is None:
                rng = _example_rng(seed, masked.source_id)
            chosen = cands[int(rng.choice(len(cands), p=weights / weights.sum()))]
            fills.append(Fill(position=pos, token=chosen, fallback=True))
        else:
            fills.append(Fill(position=pos, token=chosen))
        tokens[pos] = chosen
    return AugmentedExample(
        source_id=masked.source_id,
        text=_splice(masked, fills),
        label=masked.label,
        fills=tuple(fills),
    )


@dataclass(frozen=True)
class ClassConditionalFiller:
    """Built-in deterministic filler: label-conditional unigram sampling."""

    vocab: Vocabulary

    def fill(
        self, masked: MaskedExample, forbidden: frozenset[str], seed: int
    ) -> AugmentedExample:
        return class_conditional_fill(masked, self.vocab, forbidden, seed)


@dataclass(frozen=True)
class BackendFiller:
    """Filler that queries a fill-mask backend, with built-in fallback."""

    backend: object
    top_k: int = 10
    vocab: Optional[Vocabulary] = None

    def fill(
        self, masked: MaskedExample, forbidden: frozenset[str], seed: int
    ) -> AugmentedExample:
        return backend_fill(
            masked, self.backend, forbidden, top_k=self.top_k, vocab=self.vocab, seed=seed
        )


def _augmented_id(source_id: str, taken: set[str]) -> str:
    new_id = f"{source_id}_aug"
    suffix = 2
    while new_id in taken:
        new_id = f"{source_id}_aug{suffix}"
        suffix += 1
    return new_id


def augment_records(
    dataset: LabeledDataset,
    rset: ReplacementSet,
    filler: MaskFiller,
    seed: int,
) -> list[tuple[Example, AugmentedExample]]:
    """One (new example, provenance record) pair per source example.

    Zero-mask sources still emit an unmodified copy so the corpus size
    exactly doubles.  New ids append ``_aug`` to the source id.
    """
    if not dataset.is_labeled:
        raise DataError("augmentation requires a fully labeled dataset")
    forbidden = rset.tokens
    taken = {ex.id for ex in dataset}
    records: list[tuple[Example, AugmentedExample]] = []
    for ex in dataset:
        masked = mask_example(ex, rset)
        aug = filler.fill(masked, forbidden, seed)
        new_id = _augmented_id(ex.id, taken)
        taken.add(new_id)
        records.append((Example(id=new_id, text=aug.text, label=aug.label), aug))
    return records


def augment_dataset(
    dataset: LabeledDataset,
    rset: ReplacementSet,
    filler: MaskFiller,
    seed: int,
) -> LabeledDataset:
    """Original examples followed by exactly one augmented example each."""
    records = augment_records(dataset, rset, filler, seed)
    return LabeledDataset(
        split=dataset.split,
        examples=dataset.examples + tuple(ex for ex, _ in records),
    )


def write_provenance(
    records: list[tuple[Example, AugmentedExample]], path: str | Path
) -> None:
    """Sidecar JSON-lines file: one record per augmented example."""
    lines = []
    for ex, aug in records:
        lines.append(
            json.dumps(
                {
                    "id": ex.id,
                    "source_id": aug.source_id,
                    "mask_positions": list(aug.mask_positions),
                    "fills": [
                        {"position": f.position, "token": f.token, "fallback": f.fallback}
                        for f in aug.fills
                    ],
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
