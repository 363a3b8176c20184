"""Adversarial trigger injection: prepend a phrase to every example."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .corpus import DataError, Example, LabeledDataset

__all__ = [
    "DEFAULT_TRIGGER",
    "TriggerPosition",
    "TriggerSpec",
    "render_trigger",
    "perturb_dataset",
]

DEFAULT_TRIGGER = "10 deaths"

_PLACEHOLDER = "{n}"


class TriggerPosition(Enum):
    PREPEND = "prepend"


@dataclass(frozen=True)
class TriggerSpec:
    """A trigger template, optionally parameterized by a count.

    ``template`` may contain the literal placeholder ``{n}``, substituted
    with the decimal rendering of ``n``.
    """

    template: str
    n: Optional[int] = None
    position: TriggerPosition = TriggerPosition.PREPEND


def render_trigger(spec: TriggerSpec) -> str:
    """Render the trigger string; placeholder requires ``n`` to be set."""
    if _PLACEHOLDER in spec.template:
        if spec.n is None:
            raise DataError(
                f"trigger template {spec.template!r} has a placeholder but no n"
            )
        trigger = spec.template.replace(_PLACEHOLDER, str(spec.n))
    else:
        trigger = spec.template
    if not trigger:
        raise DataError("rendered trigger is empty")
    if "\t" in trigger or "\n" in trigger or "\r" in trigger:
        raise DataError("trigger must not contain tab or newline")
    return trigger


def perturb_dataset(dataset: LabeledDataset, trigger: str) -> LabeledDataset:
    """Prepend ``trigger`` plus a single ASCII space to every text.

    Ids, labels, order, and count are unchanged; stripping the first
    ``len(trigger) + 1`` characters of each perturbed text recovers the
    original exactly.
    """
    if not trigger:
        raise DataError("trigger must be non-empty")
    if "\t" in trigger or "\n" in trigger or "\r" in trigger:
        raise DataError("trigger must not contain tab or newline")
    return LabeledDataset(
        split=dataset.split,
        examples=tuple(
            Example(id=ex.id, text=f"{trigger} {ex.text}", label=ex.label)
            for ex in dataset
        ),
    )
