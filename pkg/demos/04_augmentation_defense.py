#!/usr/bin/env python3
"""The full hardening loop: rank clues, augment, retrain, re-attack.

Compares the trigger-induced F1 drop of a plain model against one
retrained on the mask-and-refill doubled corpus.  Uses the same corpus
family as the acceptance suite's desk-scale phenomenon test.
"""

import random

from clueguard import (
    ClassConditionalFiller,
    Example,
    Label,
    LabeledDataset,
    Split,
    augment_dataset,
    build_vocab,
    chi2_scores,
    robustness,
    top_n,
    train_nb,
)
from clueguard.evaluator import format_robustness_table

TOPICAL = ["confirmed", "cases", "positive", "hospital", "county", "officials",
           "health", "tested", "update", "recovered", "quarantine", "outbreak",
           "patients", "ventilators", "icu", "surge", "testing", "labs",
           "clusters", "records", "tracing", "variants", "screening", "wards"]
FILLER = ["the", "to", "of", "and", "in", "a", "for", "on", "is", "covid",
          "virus", "pandemic", "today", "people", "news", "day"]
CASUAL = """brunch coffee latte tacos pizza burger fries cookies cupcake smoothie picnic sunset
sunrise beach hiking camping garden puppy kitten selfie playlist concert guitar piano karaoke
movie series anime gaming chess puzzle novel poetry painting sketch crafts knitting yoga pilates
jogging cycling skate surf soccer hoops tennis golf bowling fishing roadtrip vacay mood vibes
chill cozy snug bliss giggle laughs memes prank gossip bestie squad crush birthday wedding
shopping thrift outfit sneakers fashion makeup skincare glitter nails tattoo haircut barber
recipe baking sourdough espresso matcha boba sushi ramen noodles pancakes waffles bacon avocado
mango berries lemonade cocktail mocktail brownies donuts bagels pretzels popcorn nachos salsa
hammock bonfire fireworks glamping stargazing doodles scrapbook origami pottery ceramics
skateboard trampoline frisbee kayak paddle snorkel sailing climbing bouldering parkour zumba
swing waltz ballet hiphop jazz blues reggae indie vinyl podcast audiobook sitcom drama
thriller romcom cosplay trivia bingo darts billiards arcade pinball minigolf laser kart drone
lego sticker marker crayon easel canvas mural graffiti henna bracelet necklace earrings vintage
flannel hoodie beanie sandals loafers boots scarf mittens cardigan denim pajamas slippers
croissant muffin scone toast granola yogurt parfait oatmeal quinoa salad wrap falafel hummus
pita gyro kebab curry biryani pho dumplings gyoza tempura teriyaki wasabi sriracha kimchi
taco burrito quesadilla churros flan gelato sorbet sundae milkshake fudge toffee caramel
marshmallow smores cocoa cider slushie icecream cheesecake tiramisu macaron eclair crepe
strudel pudding custard trifle pavlova meringue biscotti shortbread gingerbread fruitcake""".split()


def synth(n: int, seed: int, split: Split) -> LabeledDataset:
    rng = random.Random(seed)
    examples = []
    for i in range(n):
        informative = i < int(n * 0.3)
        tokens = rng.choices(FILLER, k=rng.randint(4, 7))
        if informative:
            tokens += rng.sample(TOPICAL, k=2)
            if rng.random() < 0.9:
                tokens += [str(rng.choice([10, 25, 100])), "deaths"]
        else:
            tokens += rng.sample(CASUAL, k=4)
            if rng.random() < 0.6:
                tokens.append(rng.choice(TOPICAL))
            if rng.random() < 0.05:
                tokens += [str(rng.choice([10, 25, 100])), "deaths"]
        rng.shuffle(tokens)
        label = Label.INFORMATIVE if informative else Label.UNINFORMATIVE
        examples.append(Example(id=f"{split.value}{i}", text=" ".join(tokens), label=label))
    return LabeledDataset(split=split, examples=tuple(examples))


def main() -> None:
    train = synth(2000, seed=13, split=Split.TRAIN)
    dev = synth(800, seed=14, split=Split.DEV)
    trigger = "10 deaths"
    alpha = 3.0

    vocab = build_vocab(train, min_df=5)
    plain = train_nb(train, vocab, alpha=alpha)
    plain_rep = robustness(plain, dev, trigger)

    rset = top_n(chi2_scores(vocab, train), 20)
    print(f"masking the top-{len(rset)} clue words: {sorted(rset.tokens)}\n")

    augmented = augment_dataset(train, rset, ClassConditionalFiller(vocab), seed=13)
    print(f"training corpus: {len(train)} -> {len(augmented)} examples after augmentation\n")

    hardened = train_nb(augmented, build_vocab(augmented, min_df=5), alpha=alpha)
    hardened_rep = robustness(hardened, dev, trigger)

    print(format_robustness_table({"plain": plain_rep, "augmented": hardened_rep}))
    recovered = (plain_rep.f1_drop - hardened_rep.f1_drop) * 100
    print(f"\nthe augmented model gives back {recovered:.1f} points of the drop:")
    print("doubling the corpus with clue-free variants strengthens the broad,")
    print("class-exclusive vocabulary the trigger cannot touch.")


if __name__ == "__main__":
    main()
