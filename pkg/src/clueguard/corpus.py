"""Tweet corpus handling: TSV ingestion, tokenization, count vocabularies.

The wire format is a UTF-8 TSV with a mandatory header row.  Labeled files
carry three columns (Id, Text, Label); unlabeled test files carry two
(Id, Text).  Text cells are preserved verbatim; the format makes embedded
tabs and newlines impossible.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from itertools import groupby
from pathlib import Path
from typing import Iterator, Optional

__all__ = [
    "Label",
    "Split",
    "Example",
    "LabeledDataset",
    "Vocabulary",
    "ParseError",
    "DataError",
    "DEFAULT_MIN_DF",
    "parse_tsv",
    "load_tsv",
    "serialize_tsv",
    "save_tsv",
    "tokenize",
    "token_spans",
    "build_vocab",
]

DEFAULT_MIN_DF = 5


class ParseError(ValueError):
    """Raised when a TSV stream violates the corpus wire format."""


class DataError(ValueError):
    """Raised when data is structurally valid but unusable for an operation."""


class Label(Enum):
    INFORMATIVE = "INFORMATIVE"
    UNINFORMATIVE = "UNINFORMATIVE"

    def __str__(self) -> str:
        return self.value


class Split(Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Example:
    """One tweet: opaque id, raw text, optional gold label."""

    id: str
    text: str
    label: Optional[Label] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("example id must be non-empty")
        if "\t" in self.id or "\n" in self.id or "\r" in self.id:
            raise DataError(f"example id {self.id!r} contains tab or newline")
        if not self.text.strip():
            raise DataError(f"example {self.id}: text is empty after trimming")
        if "\t" in self.text or "\n" in self.text or "\r" in self.text:
            raise DataError(f"example {self.id}: text contains tab or newline")


@dataclass(frozen=True)
class LabeledDataset:
    """Ordered collection of examples with a split tag.

    Iteration order is file order and stable across runs.  Ids are unique
    within a dataset.
    """

    split: Split
    examples: tuple[Example, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for ex in self.examples:
            if ex.id in seen:
                raise DataError(f"duplicate example id {ex.id!r}")
            seen.add(ex.id)

    def __iter__(self) -> Iterator[Example]:
        return iter(self.examples)

    def __len__(self) -> int:
        return len(self.examples)

    @property
    def is_labeled(self) -> bool:
        return all(ex.label is not None for ex in self.examples)

    def labels(self) -> list[Label]:
        """Gold labels in order; raises if any example is unlabeled."""
        out = []
        for ex in self.examples:
            if ex.label is None:
                raise DataError(f"example {ex.id} is unlabeled")
            out.append(ex.label)
        return out

    def texts(self) -> list[str]:
        return [ex.text for ex in self.examples]

    def label_counts(self) -> dict[Label, int]:
        counts = {label: 0 for label in Label}
        for ex in self.examples:
            if ex.label is not None:
                counts[ex.label] += 1
        return counts


@dataclass(frozen=True)
class Vocabulary:
    """Count vocabulary over a labeled corpus.

    ``terms`` maps each kept token to a dense index (sorted token order).
    ``doc_freq`` counts documents containing the token at least once.
    ``term_class_count`` holds total occurrences per (token, label) —
    counts, not presence.
    """

    terms: dict[str, int]
    doc_freq: dict[str, int]
    term_class_count: dict[tuple[str, Label], int]

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, token: str) -> bool:
        return token in self.terms

    def term_total(self, token: str) -> int:
        return sum(self.term_class_count.get((token, label), 0) for label in Label)

    def class_count(self, token: str, label: Label) -> int:
        return self.term_class_count.get((token, label), 0)


def tokenize(text: str) -> list[str]:
    """Lowercase a text and split it into maximal alphanumeric runs.

    Every non-alphanumeric character is a separator.  Total function: any
    input yields a (possibly empty) token list, order preserved.
    """
    lowered = text.lower()
    return ["".join(run) for is_word, run in groupby(lowered, key=str.isalnum) if is_word]


def token_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of the maximal alphanumeric runs of ``text``.

    Spans index the original (un-lowercased) string so callers can splice
    replacements back in without disturbing surrounding punctuation.
    """
    spans: list[tuple[int, int]] = []
    start: Optional[int] = None
    for i, ch in enumerate(text):
        if ch.isalnum():
            if start is None:
                start = i
        elif start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, len(text)))
    return spans


def _parse_label(raw: str, line_no: int) -> Label:
    try:
        return Label(raw.strip().upper())
    except ValueError:
        raise ParseError(f"line {line_no}: unknown label {raw!r}") from None


def parse_tsv(data: bytes | str, split: Split) -> LabeledDataset:
    """Parse a TSV byte stream into a dataset.

    The first line must be a header with two or three tab-separated columns;
    every data row must match the header's column count.  Labels are parsed
    case-insensitively.  Raises :class:`ParseError` naming the offending line
    on malformed rows, unknown labels, or duplicate ids.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    else:
        text = data

    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input: header row is required")

    header_cols = lines[0].split("\t")
    if len(header_cols) not in (2, 3):
        raise ParseError(
            f"line 1: header has {len(header_cols)} columns, expected 2 or 3"
        )
    n_cols = len(header_cols)

    examples: list[Example] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if line == "":
            # Tolerate a trailing blank line produced by a final newline.
            continue
        cols = line.split("\t")
        if len(cols) != n_cols:
            raise ParseError(
                f"line {line_no}: expected {n_cols} columns, found {len(cols)}"
            )
        ex_id = cols[0]
        if ex_id in seen_ids:
            raise ParseError(f"line {line_no}: duplicate id {ex_id!r}")
        seen_ids.add(ex_id)
        label = _parse_label(cols[2], line_no) if n_cols == 3 else None
        try:
            examples.append(Example(id=ex_id, text=cols[1], label=label))
        except DataError as exc:
            raise ParseError(f"line {line_no}: {exc}") from None
    return LabeledDataset(split=split, examples=tuple(examples))


def load_tsv(path: str | Path, split: Split) -> LabeledDataset:
    """Read and parse a TSV file."""
    return parse_tsv(Path(path).read_bytes(), split)


def serialize_tsv(dataset: LabeledDataset) -> bytes:
    """Serialize a dataset back to canonical TSV bytes.

    Labeled datasets get three columns with uppercase labels; fully
    unlabeled ones get two.  Round-trips the data rows of well-formed
    input byte-identically.
    """
    labeled = dataset.is_labeled and len(dataset) > 0
    lines = ["Id\tText\tLabel" if labeled or len(dataset) == 0 else "Id\tText"]
    for ex in dataset:
        if labeled:
            lines.append(f"{ex.id}\t{ex.text}\t{ex.label.value}")
        elif ex.label is not None:
            raise DataError(
                f"example {ex.id} is labeled but the dataset is partially unlabeled"
            )
        else:
            lines.append(f"{ex.id}\t{ex.text}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def save_tsv(dataset: LabeledDataset, path: str | Path) -> None:
    Path(path).write_bytes(serialize_tsv(dataset))


def build_vocab(dataset: LabeledDataset, min_df: int = DEFAULT_MIN_DF) -> Vocabulary:
    """Count tokens over a fully labeled dataset and keep those with
    document frequency >= ``min_df``.

    ``term_class_count`` accumulates occurrence counts (a token appearing
    twice in one document counts twice).  Raises :class:`DataError` on an
    empty dataset or any unlabeled example.
    """
    if min_df < 1:
        raise DataError(f"min_df must be >= 1, got {min_df}")
    if len(dataset) == 0:
        raise DataError("cannot build a vocabulary from an empty dataset")

    doc_freq: Counter[str] = Counter()
    class_count: Counter[tuple[str, Label]] = Counter()
    for ex in dataset:
        if ex.label is None:
            raise DataError(f"example {ex.id} is unlabeled")
        tokens = tokenize(ex.text)
        doc_freq.update(set(tokens))
        for tok in tokens:
            class_count[(tok, ex.label)] += 1

    kept = sorted(t for t, df in doc_freq.items() if df >= min_df)
    terms = {t: i for i, t in enumerate(kept)}
    kept_set = set(kept)
    return Vocabulary(
        terms=terms,
        doc_freq={t: doc_freq[t] for t in kept},
        term_class_count={
            (t, lab): c for (t, lab), c in class_count.items() if t in kept_set
        },
    )
