"""Classification metrics, multi-run aggregation, and robustness reports.

The positive class is INFORMATIVE throughout.  F1 is computed as
2*tp / (2*tp + fp + fn), the single-division form of 2PR/(P+R), so hand
computations with exact rationals match bit-for-bit.  Displayed scores
follow the "mean (std)" convention in percentage points, two decimals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence, runtime_checkable

from .corpus import DataError, Label, LabeledDataset
from .perturber import perturb_dataset

__all__ = [
    "Confusion",
    "EvalReport",
    "RobustnessReport",
    "Classifier",
    "score",
    "aggregate",
    "robustness",
    "format_mean_std",
    "report_to_json",
    "robustness_to_json",
    "format_robustness_table",
]


@runtime_checkable
class Classifier(Protocol):
    """Anything that maps a batch of texts to labels, in order."""

    def predict_labels(self, texts: Sequence[str]) -> list[Label]: ...


@dataclass(frozen=True)
class Confusion:
    """Binary confusion counts with INFORMATIVE as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )


@dataclass(frozen=True)
class EvalReport:
    """Metrics for one evaluation, plus multi-run aggregates when present.

    ``precision``, ``recall`` and ``f1`` always describe ``confusion``
    (for aggregates: the pooled counts).  ``f1_mean``/``f1_std`` are the
    across-run mean and sample standard deviation.
    """

    confusion: Confusion
    precision: float
    recall: float
    f1: float
    n_runs: int = 1
    f1_mean: Optional[float] = None
    f1_std: Optional[float] = None

    def display(self) -> str:
        """Paper-style "92.72 (0.18)" rendering of the run-level F1."""
        mean = self.f1 if self.f1_mean is None else self.f1_mean
        std = 0.0 if self.f1_std is None else self.f1_std
        return format_mean_std(mean, std)


@dataclass(frozen=True)
class RobustnessReport:
    """Clean-vs-adversarial comparison for one model and trigger."""

    clean: EvalReport
    adversarial: EvalReport
    trigger: str
    f1_drop: float
    uninformative_flipped: int


def format_mean_std(mean: float, std: float) -> str:
    return f"{mean * 100:.2f} ({std * 100:.2f})"


def _confusion(preds: Sequence[Label], golds: Sequence[Label]) -> Confusion:
    tp = fp = fn = tn = 0
    for p, g in zip(preds, golds):
        if p is Label.INFORMATIVE:
            if g is Label.INFORMATIVE:
                tp += 1
            else:
                fp += 1
        else:
            if g is Label.INFORMATIVE:
                fn += 1
            else:
                tn += 1
    return Confusion(tp=tp, fp=fp, fn=fn, tn=tn)


def _metrics(c: Confusion) -> tuple[float, float, float]:
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * c.tp / (2 * c.tp + c.fp + c.fn) if c.tp else 0.0
    return precision, recall, f1


def score(preds: Sequence[Label], golds: Sequence[Label]) -> EvalReport:
    """Precision/recall/F1 of predictions against gold labels.

    Degenerate denominators yield 0 by convention; F1 is 0 whenever tp is.
    """
    if len(preds) != len(golds):
        raise DataError(
            f"prediction/gold length mismatch: {len(preds)} vs {len(golds)}"
        )
    if not golds:
        raise DataError("cannot score an empty evaluation set")
    if any(g is None for g in golds):
        raise DataError("gold labels must all be present")
    c = _confusion(preds, golds)
    precision, recall, f1 = _metrics(c)
    return EvalReport(confusion=c, precision=precision, recall=recall, f1=f1)


def aggregate(reports: Sequence[EvalReport]) -> EvalReport:
    """Pool runs: micro metrics from summed confusions, macro mean/std of F1.

    The standard deviation uses the sample (n-1) convention and is 0 for a
    single run.
    """
    if not reports:
        raise DataError("cannot aggregate zero reports")
    pooled = reports[0].confusion
    for r in reports[1:]:
        pooled = pooled + r.confusion
    precision, recall, f1 = _metrics(pooled)
    f1s = [r.f1 for r in reports]
    n = len(f1s)
    mean = sum(f1s) / n
    std = math.sqrt(sum((x - mean) ** 2 for x in f1s) / (n - 1)) if n > 1 else 0.0
    return EvalReport(
        confusion=pooled,
        precision=precision,
        recall=recall,
        f1=f1,
        n_runs=n,
        f1_mean=mean,
        f1_std=std,
    )


def robustness(
    model: Classifier, dev: LabeledDataset, trigger: str
) -> RobustnessReport:
    """Evaluate a model on a dev set and on its trigger-prepended twin.

    ``uninformative_flipped`` counts gold-UNINFORMATIVE examples the model
    got right on clean input but pushed to INFORMATIVE under the trigger —
    the easy-clue failure mode in its purest form.
    """
    golds = dev.labels()
    clean_preds = model.predict_labels(dev.texts())
    adv_preds = model.predict_labels(perturb_dataset(dev, trigger).texts())
    clean = score(clean_preds, golds)
    adversarial = score(adv_preds, golds)
    flipped = sum(
        1
        for g, cp, ap in zip(golds, clean_preds, adv_preds)
        if g is Label.UNINFORMATIVE
        and cp is Label.UNINFORMATIVE
        and ap is Label.INFORMATIVE
    )
    return RobustnessReport(
        clean=clean,
        adversarial=adversarial,
        trigger=trigger,
        f1_drop=clean.f1 - adversarial.f1,
        uninformative_flipped=flipped,
    )


def _report_dict(report: EvalReport) -> dict:
    c = report.confusion
    out = {
        "confusion": {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn},
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "n_runs": report.n_runs,
        "display": report.display(),
    }
    if report.f1_mean is not None:
        out["f1_mean"] = report.f1_mean
        out["f1_std"] = report.f1_std
    return out


def report_to_json(report: EvalReport) -> str:
    doc = {"schema": "clueguard-eval-report/1", **_report_dict(report)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def robustness_to_json(reports: dict[str, RobustnessReport]) -> str:
    """Machine-readable document for one or more named models."""
    models = {}
    for name, rep in reports.items():
        models[name] = {
            "clean": _report_dict(rep.clean),
            "adversarial": _report_dict(rep.adversarial),
            "trigger": rep.trigger,
            "f1_drop": rep.f1_drop,
            "uninformative_flipped": rep.uninformative_flipped,
        }
    doc = {"schema": "clueguard-robustness/1", "models": models}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def format_robustness_table(reports: dict[str, RobustnessReport]) -> str:
    """Human-readable clean/adversarial F1 table, one row per model."""
    name_w = max([len("model")] + [len(n) for n in reports])
    header = (
        f"{'model':<{name_w}}  {'clean F1':>9}  {'adv F1':>9}  {'drop':>9}  {'flipped':>8}"
    )
    lines = [header, "-" * len(header)]
    for name, rep in reports.items():
        lines.append(
            f"{name:<{name_w}}  {rep.clean.f1 * 100:>9.2f}  "
            f"{rep.adversarial.f1 * 100:>9.2f}  {rep.f1_drop * 100:>9.2f}  "
            f"{rep.uninformative_flipped:>8}"
        )
    if reports:
        any_rep = next(iter(reports.values()))
        lines.append(f'trigger: "{any_rep.trigger}"')
    return "\n".join(lines) + "\n"
