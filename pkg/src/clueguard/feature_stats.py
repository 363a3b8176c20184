"""Chi-squared discriminative scores per unigram and top-N selection.

For a term t with per-label occurrence counts O[t,c] (occurrences summed
over documents of label c), the expected count under label-independence is
E[t,c] = (N_c / N) * T_t, where N_c is the number of documents of label c,
N the total document count, and T_t the term's total occurrences.  The
score is sum_c (O - E)^2 / E.  Counts feed the test, not presence flags.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import DataError, Label, LabeledDataset, Vocabulary

__all__ = [
    "TermScore",
    "ReplacementSet",
    "DEFAULT_TOP_N",
    "chi2_scores",
    "top_n",
    "serialize_replacement_set",
    "save_replacement_set",
    "parse_replacement_set",
    "load_replacement_set",
    "format_top_table",
]

DEFAULT_TOP_N = 20

_RSET_MAGIC = "clueguard-replacement-set"
_RSET_VERSION = 1

# Fixed label order for array layouts and serialized records.
_LABELS = (Label.INFORMATIVE, Label.UNINFORMATIVE)


@dataclass(frozen=True)
class TermScore:
    """One term's chi-squared score with its observed and expected counts."""

    term: str
    chi2: float
    observed: dict[Label, int]
    expected: dict[Label, float]

    @property
    def total(self) -> int:
        return sum(self.observed.values())


@dataclass(frozen=True)
class ReplacementSet:
    """The top-N terms by chi-squared score, descending.

    Ties are broken lexicographically ascending by term, so the selection
    is deterministic across platforms.  ``terms`` holds min(n, vocabulary
    size) entries.
    """

    n: int
    terms: tuple[TermScore, ...]

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise DataError(f"replacement set size must be positive, got {self.n}")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, token: str) -> bool:
        return token in self.tokens

    @property
    def tokens(self) -> frozenset[str]:
        return frozenset(ts.term for ts in self.terms)


def chi2_scores(vocab: Vocabulary, dataset: LabeledDataset) -> list[TermScore]:
    """Chi-squared score for every vocabulary term, in vocabulary order.

    Requires a fully labeled dataset with at least one document per label
    (a zero-document label would force expected counts of zero).  Terms
    with zero total occurrences are excluded.
    """
    if len(vocab) == 0:
        raise DataError("empty vocabulary")
    doc_counts = dataset.label_counts()
    n_total = len(dataset)
    for label in _LABELS:
        if doc_counts[label] == 0:
            raise DataError(f"label {label} has zero documents")

    terms = sorted(vocab.terms, key=vocab.terms.__getitem__)
    observed = np.array(
        [[vocab.class_count(t, lab) for lab in _LABELS] for t in terms],
        dtype=np.float64,
    )
    class_frac = np.array([doc_counts[lab] / n_total for lab in _LABELS])
    totals = observed.sum(axis=1)
    expected = totals[:, None] * class_frac[None, :]

    keep = totals > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        chi2 = np.where(
            keep, ((observed - expected) ** 2 / np.where(keep[:, None], expected, 1.0)).sum(axis=1), 0.0
        )

    return [
        TermScore(
            term=t,
            chi2=float(chi2[i]),
            observed={lab: int(observed[i, j]) for j, lab in enumerate(_LABELS)},
            expected={lab: float(expected[i, j]) for j, lab in enumerate(_LABELS)},
        )
        for i, t in enumerate(terms)
        if keep[i]
    ]


def top_n(scores: list[TermScore], n: int = DEFAULT_TOP_N) -> ReplacementSet:
    """Select the n highest-chi2 terms (ties: lexicographic ascending)."""
    if n <= 0:
        raise DataError(f"n must be positive, got {n}")
    if not scores:
        raise DataError("no term scores to select from")
    ranked = sorted(scores, key=lambda ts: (-ts.chi2, ts.term))
    return ReplacementSet(n=n, terms=tuple(ranked[:n]))


def serialize_replacement_set(rset: ReplacementSet) -> str:
    """Versioned text document: one record per term with score and counts."""
    lines = [
        f"{_RSET_MAGIC} v{_RSET_VERSION}",
        f"n\t{rset.n}",
        "term\tchi2\t" + "\t".join(lab.value for lab in _LABELS),
    ]
    for ts in rset.terms:
        obs = "\t".join(str(ts.observed.get(lab, 0)) for lab in _LABELS)
        lines.append(f"{ts.term}\t{ts.chi2!r}\t{obs}")
    return "\n".join(lines) + "\n"


def save_replacement_set(rset: ReplacementSet, path: str | Path) -> None:
    Path(path).write_text(serialize_replacement_set(rset), encoding="utf-8")


def parse_replacement_set(text: str) -> ReplacementSet:
    """Parse the document written by :func:`serialize_replacement_set`.

    Expected counts are recomputed from the stored observed counts only at
    score time; records loaded from disk carry empty expected maps since
    the document does not persist them.
    """
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or not lines[0].startswith(_RSET_MAGIC):
        raise DataError("not a replacement-set document")
    version = lines[0].removeprefix(_RSET_MAGIC).strip()
    if version != f"v{_RSET_VERSION}":
        raise DataError(f"unsupported replacement-set version {version!r}")
    if len(lines) < 3 or not lines[1].startswith("n\t"):
        raise DataError("malformed replacement-set document")
    n = int(lines[1].split("\t")[1])
    terms = []
    for ln in lines[3:]:
        cols = ln.split("\t")
        if len(cols) != 2 + len(_LABELS):
            raise DataError(f"malformed replacement-set record {ln!r}")
        observed = {lab: int(cols[2 + j]) for j, lab in enumerate(_LABELS)}
        terms.append(
            TermScore(term=cols[0], chi2=float(cols[1]), observed=observed, expected={})
        )
    return ReplacementSet(n=n, terms=tuple(terms))


def load_replacement_set(path: str | Path) -> ReplacementSet:
    return parse_replacement_set(Path(path).read_text(encoding="utf-8"))


def format_top_table(rset: ReplacementSet) -> str:
    """Human-readable ranked table of the replacement set."""
    width = max([len("term")] + [len(ts.term) for ts in rset.terms])
    header = f"{'rank':>4}  {'term':<{width}}  {'chi2':>12}  " + "  ".join(
        f"{lab.value:>13}" for lab in _LABELS
    )
    rows = [header, "-" * len(header)]
    for rank, ts in enumerate(rset.terms, start=1):
        obs = "  ".join(f"{ts.observed.get(lab, 0):>13}" for lab in _LABELS)
        rows.append(f"{rank:>4}  {ts.term:<{width}}  {ts.chi2:>12.4f}  {obs}")
    return "\n".join(rows) + "\n"
