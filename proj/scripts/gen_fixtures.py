#!/usr/bin/env python3
"""Regenerates the bundled desk-scale corpora in data/.

Both corpora are synthetic stand-ins with the label counts of the public
datasets they imitate. Output is deterministic for a given seed.
"""
import argparse
import json
import random
from pathlib import Path

SHARED = """the a of and to in on for with at by from as that this it is was were be
been have has had people city town family street house school work time year day week
morning evening night friends neighbors water road market church park river car train
music radio kitchen table window door garden summer winter bread coffee letter photo
very just still also often always never really quite little big small long old young
we they our their my his her you i he she us them about into over after before""".split()

NOSTALGIC = """remember remembered memories memory childhood grandmother grandfather
nostalgia nostalgic used_to back_then those_days old_days longing miss missed yearning
youth bygone reminisce recall recalled simpler innocence olden faded vintage once_upon
growing_up as_a_kid sepia treasured fondly golden_age heritage""".split()

CURRENT = """today tomorrow plan planned schedule budget policy update report meeting
deadline project launch new latest upcoming forecast proposal committee agenda invoice
quarterly strategy announce announced review pricing traffic weather election results
software network delivery order shipping app download subscription""".split()


def phrase_bank(rng, size, core, filler):
    bank = []
    for _ in range(size):
        words = [rng.choice(filler) for _ in range(rng.randint(2, 4))]
        if core:
            words.insert(rng.randrange(len(words) + 1), rng.choice(core).replace("_", " "))
        bank.append(" ".join(words))
    return bank


def sentence(rng, own, leak, shared, p_own, max_words):
    target = min(max_words, rng.randint(6, 36))
    words = []
    while len(words) < target:
        r = rng.random()
        bank = own if r < p_own else leak if r < p_own + 0.04 else shared
        words += rng.choice(bank).split()
    text = " ".join(words[:target])
    return text[0].upper() + text[1:] + "."


def nostalgia(rng, n_pos=151, n_neg=1049):
    shared = phrase_bank(rng, 120, None, SHARED)
    past = phrase_bank(rng, 45, NOSTALGIC, SHARED)
    present = phrase_bank(rng, 45, CURRENT, SHARED)
    rows = [("nostalgic", sentence(rng, past, present, shared, 0.4, 60)) for _ in range(n_pos)]
    rows += [("not_nostalgic", sentence(rng, present, past, shared, 0.4, 60)) for _ in range(n_neg)]
    rng.shuffle(rows)
    return [{"id": f"n{i:04d}", "text": t, "label": l, "origin": "original"} for i, (l, t) in enumerate(rows)]


SPEECH_TOPICS = {
    "famous": "history freedom nation destiny sacrifice generation courage liberty dream future".split(),
    "international": "summit partners treaty cooperation united nations delegation bilateral trade alliance".split(),
    "ribboncutting": "opening bridge hospital inaugurate factory ribbon facility investment jobs construction".split(),
    "campaign": "vote election candidate opponent promise rally supporters ballot victory platform".split(),
}
SPEECH_COUNTS = {"famous": 220, "international": 218, "ribboncutting": 213, "campaign": 192}


def speech_length(rng):
    # Right-skewed lengths in [139, 1468] with mean near 415.
    while True:
        n = int(rng.lognormvariate(5.93, 0.42))
        if 139 <= n <= 1468:
            return n


def gpd(rng):
    rows = []
    leaders = [f"leader-{k:03d}" for k in range(190)]
    for label, count in SPEECH_COUNTS.items():
        topic = SPEECH_TOPICS[label]
        others = [w for l, ws in SPEECH_TOPICS.items() if l != label for w in ws]
        for k in range(count):
            n = speech_length(rng)
            if label == "famous" and k < 2:
                n = (139, 1468)[k]  # pin the length range bounds
            words = [rng.choice(SHARED) for _ in range(n)]
            for _ in range(max(3, n // 25)):
                words[rng.randrange(n)] = rng.choice(topic)
            for _ in range(max(1, n // 80)):
                words[rng.randrange(n)] = rng.choice(others)
            rows.append((label, rng.choice(leaders), " ".join(words)))
    rng.shuffle(rows)
    return [{"id": f"s{i:04d}", "text": t, "label": l, "origin": "original", "speaker": s}
            for i, (l, s, t) in enumerate(rows)]


def write(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    write(args.out / "nostalgia_desk.jsonl", nostalgia(random.Random(args.seed)))
    write(args.out / "gpd_desk.jsonl", gpd(random.Random(args.seed + 1)))


if __name__ == "__main__":
    main()
