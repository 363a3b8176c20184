#!/usr/bin/env python3
"""Ingest a tiny labeled corpus and rank its discriminative unigrams.

Walks the first stage of the pipeline: TSV parsing, tokenization,
vocabulary counts, chi-squared scoring, and top-N selection.
"""

from clueguard import Split, build_vocab, chi2_scores, parse_tsv, tokenize, top_n
from clueguard.feature_stats import format_top_table

RAW = """Id\tText\tLabel
t1\tOfficial update: 12 deaths reported in Parker County\tINFORMATIVE
t2\tHealth dept confirms 3 new cases, 1 recovered\tINFORMATIVE
t3\tBREAKING: hospital reports 10 deaths overnight\tINFORMATIVE
t4\tCounty officials: 45 tested positive this week\tINFORMATIVE
t5\tmissing my barista and my usual oat latte\tUNINFORMATIVE
t6\tmovie night!! snacks, blankets, good vibes\tUNINFORMATIVE
t7\tcan't stop listening to this playlist lol\tUNINFORMATIVE
t8\tsourdough attempt number four... send help\tUNINFORMATIVE
"""

def main() -> None:
    dataset = parse_tsv(RAW.encode("utf-8"), Split.TRAIN)
    print(f"parsed {len(dataset)} tweets; labels: {dataset.label_counts()}\n")

    sample = dataset.examples[0].text
    print(f"tokenizer on {sample!r}:")
    print(f"  -> {tokenize(sample)}\n")

    vocab = build_vocab(dataset, min_df=1)
    print(f"vocabulary: {len(vocab)} terms (min_df=1)")

    scores = chi2_scores(vocab, dataset)
    rset = top_n(scores, 10)
    print("\ntop 10 unigrams by chi-squared score:\n")
    print(format_top_table(rset))
    print("these are the words a classifier can lean on as easy clues;")
    print("they feed the masking stage of the augmentor.")


if __name__ == "__main__":
    main()
