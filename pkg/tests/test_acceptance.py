"""Acceptance gates: one test (or pair) per release criterion.

Each test carries an ``acceptance`` marker; the conftest plugin prints a
PASS/FAIL/SKIP line per criterion at the end of the session.  Criteria C3
and C7b need the shared-task TSV files and are skipped unless
``CLUEGUARD_DATA_DIR`` (or ./data) provides train.tsv / dev.tsv.
"""

import os
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from clueguard.augmentor import ClassConditionalFiller, augment_dataset, mask_example
from clueguard.baseline import train_nb
from clueguard.corpus import (
    Example,
    Label,
    LabeledDataset,
    Split,
    build_vocab,
    load_tsv,
    serialize_tsv,
    tokenize,
)
from clueguard.evaluator import aggregate, format_mean_std, robustness, score
from clueguard.feature_stats import chi2_scores, top_n
from clueguard.protocol import ProtocolError, TransportError, connect

import synthgen
from oracles import chi2_oracle, prf_oracle
from test_protocol import stub_argv

I, U = Label.INFORMATIVE, Label.UNINFORMATIVE

# Top 20 unigrams the chi-squared analysis is expected to recover on the
# shared-task training split.
EXPECTED_TOP20 = {
    "breaking", "bringing", "case", "cases", "confirmed", "confirms",
    "county", "deaths", "department", "died", "employee", "help", "new",
    "old", "positive", "recovered", "reported", "tested", "total", "user",
}


def _data_dir() -> Path:
    return Path(os.environ.get("CLUEGUARD_DATA_DIR", Path(__file__).parent.parent / "data"))


def _require_data(*names: str) -> list[Path]:
    paths = [_data_dir() / name for name in names]
    missing = [p.name for p in paths if not p.exists()]
    if missing:
        pytest.skip(
            f"shared-task data not available ({', '.join(missing)} not found under "
            f"{_data_dir()}; set CLUEGUARD_DATA_DIR)"
        )
    return paths


def _random_labeled_dataset(rng: random.Random, min_docs=2, max_docs=10,
                            min_terms=2, max_terms=8) -> LabeledDataset:
    terms = [f"t{i}" for i in range(rng.randint(min_terms, max_terms))]
    n_docs = rng.randint(min_docs, max_docs)
    examples = []
    for i in range(n_docs):
        label = I if i == 0 else U if i == 1 else rng.choice([I, U])
        tokens = rng.choices(terms, k=rng.randint(1, 8))
        examples.append(Example(id=f"d{i}", text=" ".join(tokens), label=label))
    return LabeledDataset(split=Split.TRAIN, examples=tuple(examples))


@pytest.mark.acceptance("C1", "chi-squared matches brute-force oracle on 100 random corpora")
def test_c1_chi2_oracle_equivalence():
    start = time.perf_counter()
    rng = random.Random(13)
    for _ in range(100):
        ds = _random_labeled_dataset(rng)
        vocab = build_vocab(ds, min_df=1)
        got = {ts.term: ts.chi2 for ts in chi2_scores(vocab, ds)}
        want = chi2_oracle([(ex.text.split(), ex.label.value) for ex in ds])
        assert got.keys() == want.keys()
        for term, expected in want.items():
            assert abs(got[term] - expected) <= 1e-9, term
    assert time.perf_counter() - start < 1.0


@pytest.mark.acceptance("C2", "fixture chi2 values and top-1 selection")
def test_c2_fixture_values(fixture_corpus):
    vocab = build_vocab(fixture_corpus, min_df=1)
    scores = chi2_scores(vocab, fixture_corpus)
    by_term = {ts.term: ts.chi2 for ts in scores}
    assert by_term["deaths"] == pytest.approx(2.0, abs=1e-12)
    assert by_term["stay"] == pytest.approx(1.0, abs=1e-12)
    assert {ts.term for ts in top_n(scores, 1).terms} == {"deaths"}


@pytest.mark.acceptance("C3", "top-20 unigrams on shared-task train overlap >=15/20")
def test_c3_shared_task_top20_overlap():
    (train_path,) = _require_data("train.tsv")
    start = time.perf_counter()
    train = load_tsv(train_path, Split.TRAIN)
    assert len(train) == 7000
    counts = train.label_counts()
    assert counts[I] == 3303
    assert counts[U] == 3697
    vocab = build_vocab(train, min_df=5)
    rset = top_n(chi2_scores(vocab, train), 20)
    overlap = rset.tokens & EXPECTED_TOP20
    assert len(overlap) >= 15, sorted(rset.tokens)
    assert time.perf_counter() - start < 10.0


@pytest.mark.acceptance("C4", "augmentation invariants over 1000 random cases")
def test_c4_augmentation_property_suite():
    start = time.perf_counter()
    rng = random.Random(4)
    pool = ["deaths", "cases", "10", "stay", "home", "good", "vibes",
            "covid", "news", "today", "county", "lol"]
    for case in range(1000):
        n_docs = rng.randint(1, 8)
        examples = tuple(
            Example(
                id=f"c{case}d{i}",
                text=" ".join(rng.choices(pool, k=rng.randint(1, 10))),
                label=rng.choice([I, U]),
            )
            for i in range(n_docs)
        )
        ds = LabeledDataset(split=Split.TRAIN, examples=examples)
        vocab = build_vocab(ds, min_df=1)
        scores = chi2_scores(vocab, ds) if len({ex.label for ex in ds}) == 2 else None
        if scores is None:
            # chi2 needs both labels; use a fixed single-term set instead.
            from clueguard.feature_stats import ReplacementSet, TermScore
            rset = ReplacementSet(
                n=1, terms=(TermScore("deaths", 1.0, {}, {}),)
            )
        else:
            rset = top_n(scores, rng.randint(1, 4))
        filler = ClassConditionalFiller(vocab)
        seed = rng.randint(0, 10_000)
        try:
            out = augment_dataset(ds, rset, filler, seed)
        except Exception as exc:
            # Only legitimate failure: every candidate forbidden.
            from clueguard.augmentor import AugmentError
            assert isinstance(exc, AugmentError)
            continue

        assert len(out) == 2 * len(ds)
        originals = out.examples[: len(ds)]
        augmented = out.examples[len(ds):]
        assert originals == ds.examples
        forbidden = rset.tokens
        for src, aug in zip(ds, augmented):
            assert aug.label == src.label
            src_tokens = tokenize(src.text)
            out_tokens = tokenize(aug.text)
            assert len(out_tokens) == len(src_tokens)
            masked = set(mask_example(src, rset).mask_positions)
            for i, tok in enumerate(out_tokens):
                if i in masked:
                    assert tok not in forbidden
                else:
                    assert tok == src_tokens[i]
        rerun = augment_dataset(ds, rset, filler, seed)
        assert serialize_tsv(rerun) == serialize_tsv(out)
    assert time.perf_counter() - start < 30.0


@pytest.mark.acceptance("C5", "perturbation exactness and round trip")
def test_c5_perturbation_exactness():
    from clueguard.perturber import perturb_dataset

    start = time.perf_counter()
    rng = random.Random(5)
    texts = [
        " ".join(rng.choices(["stay", "home", "10", "deaths", "news", "ok!"], k=rng.randint(1, 12)))
        for _ in range(1000)
    ]
    ds = LabeledDataset(
        split=Split.DEV,
        examples=tuple(
            Example(id=str(i), text=t, label=rng.choice([I, U]))
            for i, t in enumerate(texts)
        ),
    )
    adv = perturb_dataset(ds, "10 deaths")
    assert len(adv) == len(ds)
    for src, out in zip(ds, adv):
        assert out.text == "10 deaths " + src.text
        assert out.text[len("10 deaths ") :] == src.text
        assert out.id == src.id
        assert out.label == src.label
    assert time.perf_counter() - start < 1.0


# 20 confusion matrices covering the degenerate corners.
_CONFUSIONS = [
    (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
    (2, 1, 1, 1), (5, 0, 0, 5), (0, 5, 5, 0), (3, 2, 0, 1),
    (3, 0, 2, 1), (0, 0, 3, 7), (0, 3, 0, 7), (10, 1, 2, 30),
    (1, 1, 1, 1), (7, 3, 1, 9), (4, 4, 4, 4), (1, 9, 1, 9),
    (9, 1, 9, 1), (6, 0, 1, 0), (1, 0, 6, 0), (25, 5, 10, 60),
]


@pytest.mark.acceptance("C6", "metric oracle over 20 confusion matrices, display format")
def test_c6_metric_oracle():
    start = time.perf_counter()
    assert len(_CONFUSIONS) == 20
    for tp, fp, fn, tn in _CONFUSIONS:
        preds = [I] * (tp + fp) + [U] * (fn + tn)
        golds = [I] * tp + [U] * fp + [I] * fn + [U] * tn
        rep = score(preds, golds)
        assert (rep.confusion.tp, rep.confusion.fp, rep.confusion.fn, rep.confusion.tn) == (
            tp, fp, fn, tn,
        )
        precision, recall, f1 = prf_oracle(tp, fp, fn)
        assert rep.precision == precision
        assert rep.recall == recall
        assert rep.f1 == f1
        if tp == 0:
            assert rep.f1 == 0.0

    assert format_mean_std(0.9272, 0.0018) == "92.72 (0.18)"
    single = aggregate([score([I], [I])])
    assert single.display() == "100.00 (0.00)"
    assert time.perf_counter() - start < 1.0


def _robustness_pair(train, dev, alpha):
    """Robustness reports for the plain and augmentation-retrained model."""
    vocab = build_vocab(train, min_df=5)
    plain = train_nb(train, vocab, alpha=alpha)
    plain_rep = robustness(plain, dev, "10 deaths")

    rset = top_n(chi2_scores(vocab, train), 20)
    aug_train = augment_dataset(train, rset, ClassConditionalFiller(vocab), seed=13)
    assert len(aug_train) == 2 * len(train)
    aug_vocab = build_vocab(aug_train, min_df=5)
    aug_model = train_nb(aug_train, aug_vocab, alpha=alpha)
    aug_rep = robustness(aug_model, dev, "10 deaths")
    return plain_rep, aug_rep


@pytest.mark.acceptance("C7a", "synthetic corpus: clean F1, trigger collapse, augmentation recovery")
def test_c7a_synthetic_phenomenon():
    start = time.perf_counter()
    train = synthgen.generate_corpus(2000, seed=13)
    dev = synthgen.generate_corpus(800, seed=14, split=Split.DEV, id_prefix="dev")
    plain_rep, aug_rep = _robustness_pair(train, dev, alpha=synthgen.EVAL_ALPHA)

    assert plain_rep.clean.f1 >= 0.90
    assert plain_rep.f1_drop >= 0.30
    assert aug_rep.f1_drop < plain_rep.f1_drop
    assert time.perf_counter() - start < 30.0


@pytest.mark.acceptance("C7b", "shared-task data: clean F1, trigger drop, augmentation recovery")
def test_c7b_shared_task_phenomenon():
    train_path, dev_path = _require_data("train.tsv", "dev.tsv")
    start = time.perf_counter()
    train = load_tsv(train_path, Split.TRAIN)
    dev = load_tsv(dev_path, Split.DEV)
    plain_rep, aug_rep = _robustness_pair(train, dev, alpha=1.0)

    assert plain_rep.clean.f1 >= 0.75
    assert plain_rep.f1_drop >= 0.10
    assert aug_rep.f1_drop < plain_rep.f1_drop
    assert time.perf_counter() - start < 60.0


@pytest.mark.acceptance("C8", "loopback protocol conformance: handshake, arity, ordering, timeout, crash")
def test_c8_protocol_conformance():
    start = time.perf_counter()

    # Handshake + capabilities.
    handle = connect(stub_argv(), required_ops=("train", "predict", "fill_mask"))
    assert handle.capabilities >= {"train", "predict", "fill_mask"}

    # Arity and order.
    labels = handle.predict(["10 deaths here", "calm seas", "deaths again"], timeout=5.0)
    assert labels == [I, U, I]

    # fill_mask candidate contract.
    candidates = handle.fill_mask("10 [MASK] reported", top_k=3, timeout=5.0)
    assert 0 < len(candidates) <= 3
    assert all(isinstance(tok, str) for tok, _ in candidates)
    handle.shutdown()

    # Request/response pairing.
    mismatched = connect(stub_argv("--wrong-id-op", "predict"), required_ops=("predict",))
    with pytest.raises(ProtocolError):
        mismatched.predict(["x"], timeout=5.0)
    mismatched.close()

    # Timeout containment: the client must give up on schedule, not hang.
    hanging = connect(stub_argv("--hang-op", "predict"), required_ops=("predict",))
    t0 = time.perf_counter()
    with pytest.raises(TransportError):
        hanging.predict(["x"], timeout=0.4)
    assert time.perf_counter() - t0 < 1.5
    assert hanging.broken
    hanging.close()

    # Crash containment.
    crashing = connect(stub_argv("--exit-after", "1"), required_ops=("predict",))
    crashing.predict(["x"], timeout=5.0)
    with pytest.raises(TransportError):
        crashing.predict(["y"], timeout=5.0)
    crashing.close()

    assert time.perf_counter() - start < 5.0
