#!/usr/bin/env python3
"""Mask-and-refill augmentation, step by step on a handful of tweets.

Shows the intermediate artifacts: the masked token sequence, the chosen
fill tokens with their provenance, and the doubled output corpus.
"""

from clueguard import (
    ClassConditionalFiller,
    Split,
    augment_records,
    build_vocab,
    chi2_scores,
    mask_example,
    parse_tsv,
    top_n,
)

RAW = """Id\tText\tLabel
a\t10 deaths reported in the county today\tINFORMATIVE
b\tdeaths rising: hospital confirms 23 cases\tINFORMATIVE
c\tofficials say 7 recovered, 2 deaths\tINFORMATIVE
d\tperfect morning for coffee and a long walk\tUNINFORMATIVE
e\tweekend plans: movies, naps, repeat\tUNINFORMATIVE
f\tmy cat just knocked over the good mug again\tUNINFORMATIVE
"""

def main() -> None:
    dataset = parse_tsv(RAW.encode("utf-8"), Split.TRAIN)
    vocab = build_vocab(dataset, min_df=1)
    rset = top_n(chi2_scores(vocab, dataset), 4)
    print(f"replacement set: {sorted(rset.tokens)}\n")

    ex = dataset.examples[0]
    masked = mask_example(ex, rset)
    print(f"source : {ex.text}")
    print(f"masked : {masked.masked_text}")
    print(f"slots  : {masked.mask_positions}\n")

    filler = ClassConditionalFiller(vocab)
    records = augment_records(dataset, rset, filler, seed=13)
    print("augmented corpus (one new example per source, labels preserved):\n")
    for new_ex, aug in records:
        fills = ", ".join(f"{f.position}->{f.token}" for f in aug.fills) or "none"
        print(f"  {aug.source_id} -> {new_ex.id}")
        print(f"    text : {new_ex.text}")
        print(f"    fills: {fills}")
    print(f"\noutput size: {len(dataset)} originals + {len(records)} augmented "
          f"= {len(dataset) + len(records)} examples (exactly doubled)")


if __name__ == "__main__":
    main()
