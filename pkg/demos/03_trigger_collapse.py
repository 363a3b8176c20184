#!/usr/bin/env python3
"""Watch a clue-reliant classifier collapse under a two-word trigger.

Trains the bag-of-words baseline on a synthetic corpus whose informative
tweets almost always carry a count+death clue, then prepends "10 deaths"
to every dev tweet and compares F1 before and after.
"""

import random

from clueguard import (
    Example,
    Label,
    LabeledDataset,
    Split,
    build_vocab,
    render_trigger,
    robustness,
    train_nb,
)
from clueguard.perturber import TriggerSpec

TOPICAL = ["confirmed", "cases", "hospital", "county", "tested", "update",
           "positive", "officials", "health", "recovered", "outbreak", "patients"]
CASUAL = """coffee playlist picnic novel yoga brunch camping selfie puzzle kitten
hiking sunset latte tacos pizza burger fries cookies smoothie beach garden puppy
concert guitar piano karaoke movie anime gaming chess poetry painting sketch
crafts knitting jogging cycling surf soccer tennis golf bowling fishing roadtrip
mood vibes chill cozy bliss memes gossip bestie squad birthday wedding shopping
outfit sneakers fashion makeup skincare nails tattoo haircut recipe baking
sourdough espresso matcha boba sushi ramen noodles pancakes waffles bacon
avocado mango berries lemonade brownies donuts bagels popcorn nachos hammock
bonfire fireworks stargazing doodles scrapbook origami pottery frisbee kayak
sailing climbing zumba ballet jazz blues reggae indie vinyl podcast sitcom
drama trivia bingo darts arcade pinball drone lego sticker crayon canvas""".split()
FILLER = ["the", "to", "of", "and", "in", "today", "covid", "news"]


def synth(n: int, seed: int, split: Split) -> LabeledDataset:
    rng = random.Random(seed)
    examples = []
    for i in range(n):
        informative = i < n // 3
        tokens = rng.choices(FILLER, k=rng.randint(3, 6))
        if informative:
            tokens += rng.sample(TOPICAL, k=2)
            if rng.random() < 0.9:
                tokens += [str(rng.choice([10, 25, 100])), "deaths"]
        else:
            tokens += rng.sample(CASUAL, k=2)
            if rng.random() < 0.6:
                tokens.append(rng.choice(TOPICAL))
            if rng.random() < 0.05:
                tokens += [str(rng.choice([10, 25, 100])), "deaths"]
        rng.shuffle(tokens)
        label = Label.INFORMATIVE if informative else Label.UNINFORMATIVE
        examples.append(Example(id=f"{split.value}{i}", text=" ".join(tokens), label=label))
    return LabeledDataset(split=split, examples=tuple(examples))


def main() -> None:
    train = synth(1500, seed=1, split=Split.TRAIN)
    dev = synth(500, seed=2, split=Split.DEV)

    vocab = build_vocab(train, min_df=3)
    model = train_nb(train, vocab, alpha=3.0)

    trigger = render_trigger(TriggerSpec(template="{n} deaths", n=10))
    report = robustness(model, dev, trigger)

    print(f'trigger: "{trigger}" prepended to every dev tweet\n')
    print(f"clean dev F1      : {report.clean.f1 * 100:6.2f}")
    print(f"adversarial dev F1: {report.adversarial.f1 * 100:6.2f}")
    print(f"drop              : {report.f1_drop * 100:6.2f} points")
    print(f"uninformative tweets flipped to informative: "
          f"{report.uninformative_flipped}")
    print("\nthe baseline scores additively per token, so two trigger tokens")
    print("shift every decision by the same fixed amount; anything near the")
    print("boundary tips over.")


if __name__ == "__main__":
    main()
