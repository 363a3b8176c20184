"""Command-line entry point wiring the toolkit's workflows together.

Subcommands: ``stats``, ``augment``, ``perturb``, ``train-eval``,
``robustness``.  All randomness flows from a single ``--seed`` (default
13); repeated runs derive per-run seeds as seed + run index.  Outputs are
byte-identical across reruns with the built-in filler and model.

Exit codes: 0 success, 2 usage, 3 corpus parse error, 4 data/validation
error, 5 backend error, 6 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import augmentor, baseline, evaluator, feature_stats, perturber
from .corpus import (
    DEFAULT_MIN_DF,
    DataError,
    LabeledDataset,
    ParseError,
    Split,
    build_vocab,
    load_tsv,
    save_tsv,
)
from .protocol import BackendClassifier, BackendError, BackendHandle, connect

__all__ = ["main", "RunConfig"]

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_DATA = 4
EXIT_BACKEND = 5
EXIT_IO = 6

DEFAULT_SEED = 13

BACKEND_ENV_VAR = "CLUEGUARD_BACKEND"


@dataclass
class RunConfig:
    """Resolved settings for one command invocation."""

    train: Optional[Path] = None
    dev: Optional[Path] = None
    input: Optional[Path] = None
    out_dir: Optional[Path] = None
    out: Optional[Path] = None
    top_n: int = feature_stats.DEFAULT_TOP_N
    min_df: int = DEFAULT_MIN_DF
    alpha: float = baseline.DEFAULT_ALPHA
    seed: int = DEFAULT_SEED
    repeat: int = 1
    trigger: Optional[str] = None
    template: Optional[str] = None
    n: Optional[int] = None
    filler: str = "builtin"
    model: str = "builtin"
    backend: Optional[str] = None
    top_k: int = 10
    rset_path: Optional[Path] = None
    with_aug: bool = False

    def __post_init__(self) -> None:
        if self.repeat < 1:
            raise DataError(f"repeat must be >= 1, got {self.repeat}")

    def resolve_trigger(self) -> str:
        if self.template is not None:
            return perturber.render_trigger(
                perturber.TriggerSpec(template=self.template, n=self.n)
            )
        if self.trigger is not None:
            return perturber.render_trigger(perturber.TriggerSpec(template=self.trigger))
        return perturber.DEFAULT_TRIGGER


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {
        k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__
    }
    return RunConfig(**fields)


def _load(path: Path, split: Split) -> LabeledDataset:
    return load_tsv(path, split)


def _replacement_set(config: RunConfig, train: LabeledDataset) -> feature_stats.ReplacementSet:
    if config.rset_path is not None:
        return feature_stats.load_replacement_set(config.rset_path)
    vocab = build_vocab(train, min_df=config.min_df)
    scores = feature_stats.chi2_scores(vocab, train)
    return feature_stats.top_n(scores, config.top_n)


def _connect_backend(config: RunConfig, required_ops: tuple[str, ...]) -> BackendHandle:
    if not config.backend:
        raise DataError(
            f"a backend target is required (--backend or ${BACKEND_ENV_VAR})"
        )
    return connect(config.backend, required_ops=required_ops)


def _ensure_out_dir(config: RunConfig) -> Path:
    if config.out_dir is None:
        raise DataError("--out-dir is required")
    config.out_dir.mkdir(parents=True, exist_ok=True)
    return config.out_dir


def cmd_stats(config: RunConfig) -> None:
    """Rank unigrams by chi-squared score and write the replacement set."""
    out_dir = _ensure_out_dir(config)
    train = _load(config.train, Split.TRAIN)
    vocab = build_vocab(train, min_df=config.min_df)
    scores = feature_stats.chi2_scores(vocab, train)
    rset = feature_stats.top_n(scores, config.top_n)
    rset_path = out_dir / "replacement_set.tsv"
    feature_stats.save_replacement_set(rset, rset_path)
    table_path = out_dir / "top_terms.txt"
    table_path.write_text(feature_stats.format_top_table(rset), encoding="utf-8")
    print(f"scored {len(scores)} terms over {len(train)} examples")
    print(f"wrote {rset_path}")
    print(f"wrote {table_path}")


def cmd_augment(config: RunConfig) -> None:
    """Mask-and-refill every training example; write the doubled corpus."""
    out_dir = _ensure_out_dir(config)
    train = _load(config.train, Split.TRAIN)
    rset = _replacement_set(config, train)
    if len(rset) == 0:
        raise DataError("replacement set is empty; nothing to mask")
    vocab = build_vocab(train, min_df=config.min_df)

    handle: Optional[BackendHandle] = None
    try:
        if config.filler == "backend":
            handle = _connect_backend(config, required_ops=("fill_mask",))
            filler: augmentor.MaskFiller = augmentor.BackendFiller(
                backend=handle, top_k=config.top_k, vocab=vocab
            )
        else:
            filler = augmentor.ClassConditionalFiller(vocab)
        records = augmentor.augment_records(train, rset, filler, config.seed)
    finally:
        if handle is not None:
            handle.shutdown()

    augmented = LabeledDataset(
        split=train.split,
        examples=train.examples + tuple(ex for ex, _ in records),
    )
    out_path = out_dir / "augmented.tsv"
    save_tsv(augmented, out_path)
    prov_path = out_dir / "augmented.provenance.jsonl"
    augmentor.write_provenance(records, prov_path)
    print(f"augmented {len(train)} -> {len(augmented)} examples")
    print(f"wrote {out_path}")
    print(f"wrote {prov_path}")


def cmd_perturb(config: RunConfig) -> None:
    """Prepend the trigger to every example of the input file."""
    if config.out is None:
        raise DataError("--out is required")
    dataset = _load(config.input, Split.OTHER)
    trigger = config.resolve_trigger()
    perturbed = perturber.perturb_dataset(dataset, trigger)
    config.out.parent.mkdir(parents=True, exist_ok=True)
    save_tsv(perturbed, config.out)
    print(f'prepended "{trigger}" to {len(perturbed)} examples')
    print(f"wrote {config.out}")


def _train_and_eval_once(
    config: RunConfig,
    train: LabeledDataset,
    dev: LabeledDataset,
    run_seed: int,
    handle: Optional[BackendHandle],
) -> evaluator.EvalReport:
    if handle is not None:
        result = handle.train(
            {
                "examples": [
                    {"id": ex.id, "text": ex.text, "label": ex.label.value}
                    for ex in train
                ],
                "dev": [
                    {"id": ex.id, "text": ex.text, "label": ex.label.value}
                    for ex in dev
                ],
                "params": {"seed": run_seed},
            }
        )
        clf: evaluator.Classifier = BackendClassifier(
            handle=handle, model_id=result.get("model_id")
        )
    else:
        vocab = build_vocab(train, min_df=config.min_df)
        clf = baseline.train_nb(train, vocab, alpha=config.alpha)
    preds = clf.predict_labels(dev.texts())
    return evaluator.score(preds, dev.labels())


def cmd_train_eval(config: RunConfig) -> None:
    """Train the chosen model, evaluate on dev, aggregate repeated runs."""
    out_dir = _ensure_out_dir(config)
    train = _load(config.train, Split.TRAIN)
    dev = _load(config.dev, Split.DEV)
    if not dev.is_labeled:
        raise DataError("dev set must be labeled for evaluation")

    handle: Optional[BackendHandle] = None
    try:
        if config.model == "backend":
            handle = _connect_backend(config, required_ops=("train", "predict"))
        reports = [
            _train_and_eval_once(config, train, dev, config.seed + i, handle)
            for i in range(config.repeat)
        ]
    finally:
        if handle is not None:
            handle.shutdown()

    report = evaluator.aggregate(reports)
    json_path = out_dir / "eval_report.json"
    json_path.write_text(evaluator.report_to_json(report), encoding="utf-8")
    txt_path = out_dir / "eval_report.txt"
    txt_path.write_text(
        f"dev F1 over {report.n_runs} run(s): {report.display()}\n", encoding="utf-8"
    )
    print(f"dev F1 over {report.n_runs} run(s): {report.display()}")
    print(f"wrote {json_path}")
    print(f"wrote {txt_path}")


def cmd_robustness(config: RunConfig) -> None:
    """Clean-vs-adversarial evaluation, optionally with an augmented twin."""
    out_dir = _ensure_out_dir(config)
    train = _load(config.train, Split.TRAIN)
    dev = _load(config.dev, Split.DEV)
    if not dev.is_labeled:
        raise DataError("dev set must be labeled for evaluation")
    trigger = config.resolve_trigger()

    required: set[str] = set()
    if config.model == "backend":
        required |= {"train", "predict"}
    if config.with_aug and config.filler == "backend":
        required |= {"fill_mask"}
    handle: Optional[BackendHandle] = None
    try:
        if required:
            handle = _connect_backend(config, tuple(sorted(required)))

        def fit(dataset: LabeledDataset) -> evaluator.Classifier:
            if config.model == "backend":
                result = handle.train(
                    {
                        "examples": [
                            {"id": ex.id, "text": ex.text, "label": ex.label.value}
                            for ex in dataset
                        ],
                        "dev": [
                            {"id": ex.id, "text": ex.text, "label": ex.label.value}
                            for ex in dev
                        ],
                        "params": {"seed": config.seed},
                    }
                )
                return BackendClassifier(handle=handle, model_id=result.get("model_id"))
            vocab = build_vocab(dataset, min_df=config.min_df)
            return baseline.train_nb(dataset, vocab, alpha=config.alpha)

        # The backend keeps one model resident, so the plain model must be
        # fully evaluated before the augmented one trains over it.
        reports = {"plain": evaluator.robustness(fit(train), dev, trigger)}

        if config.with_aug:
            train_vocab = build_vocab(train, min_df=config.min_df)
            rset = _replacement_set(config, train)
            if config.filler == "backend":
                filler: augmentor.MaskFiller = augmentor.BackendFiller(
                    backend=handle, top_k=config.top_k, vocab=train_vocab
                )
            else:
                filler = augmentor.ClassConditionalFiller(train_vocab)
            aug_train = augmentor.augment_dataset(train, rset, filler, config.seed)
            reports["augmented"] = evaluator.robustness(fit(aug_train), dev, trigger)
    finally:
        if handle is not None:
            handle.shutdown()

    json_path = out_dir / "robustness.json"
    json_path.write_text(evaluator.robustness_to_json(reports), encoding="utf-8")
    txt_path = out_dir / "robustness.txt"
    table = evaluator.format_robustness_table(reports)
    txt_path.write_text(table, encoding="utf-8")
    print(table, end="")
    print(f"wrote {json_path}")
    print(f"wrote {txt_path}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-df", dest="min_df", type=int, default=DEFAULT_MIN_DF,
                   help="minimum document frequency for vocabulary terms")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help="master random seed (default 13)")


def _add_trigger(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trigger", help='raw trigger phrase (default "10 deaths")')
    p.add_argument("--template", help='trigger template with {n}, e.g. "{n} deaths"')
    p.add_argument("--n", type=int, help="count substituted into the template")


def _add_backend(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--backend",
        default=os.environ.get(BACKEND_ENV_VAR),
        help=f"backend target: subprocess command or host:port "
        f"(${BACKEND_ENV_VAR} provides the default)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clueguard",
        description="Probe and harden text classifiers against easy-clue exploitation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="rank discriminative unigrams by chi-squared score")
    p.add_argument("--train", type=Path, required=True, help="training TSV")
    p.add_argument("--top-n", dest="top_n", type=int,
                   default=feature_stats.DEFAULT_TOP_N, help="replacement-set size")
    p.add_argument("--out-dir", dest="out_dir", type=Path, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("augment", help="mask-and-refill augmentation of the training set")
    p.add_argument("--train", type=Path, required=True, help="training TSV")
    p.add_argument("--top-n", dest="top_n", type=int,
                   default=feature_stats.DEFAULT_TOP_N, help="replacement-set size")
    p.add_argument("--rset", dest="rset_path", type=Path,
                   help="reuse a replacement-set document from `stats`")
    p.add_argument("--filler", choices=("builtin", "backend"), default="builtin")
    p.add_argument("--top-k", dest="top_k", type=int, default=10,
                   help="candidates requested per mask from the backend")
    p.add_argument("--out-dir", dest="out_dir", type=Path, required=True)
    _add_backend(p)
    _add_common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("perturb", help="prepend an adversarial trigger to every example")
    p.add_argument("--in", dest="input", type=Path, required=True, help="input TSV")
    p.add_argument("--out", type=Path, required=True, help="output TSV")
    _add_trigger(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("train-eval", help="train a model and report dev F1")
    p.add_argument("--train", type=Path, required=True)
    p.add_argument("--dev", type=Path, required=True)
    p.add_argument("--alpha", type=float, default=baseline.DEFAULT_ALPHA,
                   help="Laplace smoothing constant")
    p.add_argument("--repeat", type=int, default=1, help="number of runs to aggregate")
    p.add_argument("--model", choices=("builtin", "backend"), default="builtin")
    p.add_argument("--out-dir", dest="out_dir", type=Path, required=True)
    _add_backend(p)
    _add_common(p)
    p.set_defaults(func=cmd_train_eval)

    p = sub.add_parser("robustness", help="clean vs adversarial F1 report")
    p.add_argument("--train", type=Path, required=True)
    p.add_argument("--dev", type=Path, required=True)
    p.add_argument("--alpha", type=float, default=baseline.DEFAULT_ALPHA)
    p.add_argument("--top-n", dest="top_n", type=int,
                   default=feature_stats.DEFAULT_TOP_N)
    p.add_argument("--with-aug", dest="with_aug", action="store_true",
                   help="also train and evaluate an augmentation-hardened model")
    p.add_argument("--rset", dest="rset_path", type=Path)
    p.add_argument("--model", choices=("builtin", "backend"), default="builtin")
    p.add_argument("--filler", choices=("builtin", "backend"), default="builtin",
                   help="mask filler for the --with-aug corpus")
    p.add_argument("--top-k", dest="top_k", type=int, default=10)
    p.add_argument("--out-dir", dest="out_dir", type=Path, required=True)
    _add_trigger(p)
    _add_backend(p)
    _add_common(p)
    p.set_defaults(func=cmd_robustness)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        args.func(config)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
