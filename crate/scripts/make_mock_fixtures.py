#!/usr/bin/env python3
"""Write standard-format mock tool outputs derived from corpus ground truth.

Each mode is a pure function of the ground truth:

  perfect         ground truth verbatim
  drop-fp         every FP entry removed
  widen-any       every type list replaced by ["Any"]
  shuffle-ranked  ranked candidates with the correct type at rank 2
  partial         perfect output for two thirds of the snippets, none otherwise

Usage: make_mock_fixtures.py CORPUS OUT
"""

import json
import random
import sys
from pathlib import Path

DISTRACTORS = [
    "None", "bool", "bytes", "callable", "complex", "dict", "float",
    "frozenset", "int", "list", "set", "str", "tuple", "type",
]


def snippets(corpus):
    for gt in sorted(corpus.glob("*/*/main_gt.json")):
        yield gt.parent.parent.name, gt.parent.name, json.loads(gt.read_text())


def is_fp(entry):
    return "parameter" in entry


def shuffle_ranked(entries, rng):
    out = []
    for entry in entries:
        truth = sorted(entry["type"])
        pool = [t for t in DISTRACTORS if t not in truth]
        d = rng.sample(pool, 5)
        candidates = [d[0], truth[0]] + d[1:] + truth[1:]
        out.append(dict(entry, type=candidates, ranked=True))
    return out


def main():
    corpus, out = Path(sys.argv[1]), Path(sys.argv[2])
    rng = random.Random(7)
    modes = {
        "perfect": lambda e, i: e,
        "drop-fp": lambda e, i: [x for x in e if not is_fp(x)],
        "widen-any": lambda e, i: [dict(x, type=["Any"]) for x in e],
        "shuffle-ranked": lambda e, i: shuffle_ranked(e, rng),
        "partial": lambda e, i: e if i % 3 else None,
    }
    all_snippets = list(snippets(corpus))
    for mode, transform in modes.items():
        for index, (category, name, entries) in enumerate(all_snippets):
            result = transform(entries, index)
            if result is None:
                continue
            path = out / mode / category / f"{name}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(result, indent=2) + "\n")


if __name__ == "__main__":
    main()
