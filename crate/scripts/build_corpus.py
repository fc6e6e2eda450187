#!/usr/bin/env python3
"""Regenerate the bundled corpus under crates/core/data/.

Unigrams: the 10,000 most frequent purely alphabetic English words from the
`wordfreq` package (CC-BY-SA 4.0 data), with counts = round(frequency * 1e9).

Bigrams: adjacent word pairs from the 1993-2021 U.S. State of the Union
addresses as shipped in the npm package `@stdlib/datasets-sotu` (CC0). Pairs
are taken within sentences, both words must be in the unigram vocabulary, and
pairs seen fewer than two times are dropped.

Usage:
    pip install wordfreq
    npm pack @stdlib/datasets-sotu && tar xzf stdlib-datasets-sotu-*.tgz
    python3 scripts/build_corpus.py package/data crates/core/data
"""
import collections
import pathlib
import re
import sys

import wordfreq

VOCAB_SIZE = 10_000
FIRST_YEAR = 1993
MIN_PAIR_COUNT = 2
WORD = re.compile(r"^[a-z]+$")


def unigrams():
    out = []
    for w in wordfreq.top_n_list("en", 40_000):
        if not WORD.match(w):
            continue
        if len(w) == 1 and w not in ("a", "i"):
            continue
        out.append((w, max(1, round(wordfreq.word_frequency(w, "en") * 1e9))))
        if len(out) == VOCAB_SIZE:
            break
    return out


def bigrams(text_dir, vocab):
    counts = collections.Counter()
    for path in sorted(pathlib.Path(text_dir).glob("*.txt")):
        if int(path.name[:4]) < FIRST_YEAR:
            continue
        text = path.read_text(encoding="utf-8").lower()
        for sentence in re.split(r"[.!?;:]+", text):
            # Apostrophes and digits break the chain rather than joining tokens.
            tokens = re.split(r"[^a-z']+", sentence)
            prev = None
            for tok in tokens:
                if not tok:
                    continue
                if not WORD.match(tok) or tok not in vocab:
                    prev = None
                    continue
                if prev is not None:
                    counts[(prev, tok)] += 1
                prev = tok
    return sorted((p, n, c) for (p, n), c in counts.items() if c >= MIN_PAIR_COUNT)


def main():
    text_dir, out_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    uni = unigrams()
    vocab = {w for w, _ in uni}
    bi = bigrams(text_dir, vocab)
    with open(out_dir / "unigrams.tsv", "w", encoding="utf-8") as f:
        f.write("# word<TAB>count; wordfreq 3.1 English top list, alphabetic only\n")
        for w, c in sorted(uni):
            f.write(f"{w}\t{c}\n")
    with open(out_dir / "bigrams.tsv", "w", encoding="utf-8") as f:
        f.write("# prev<TAB>next<TAB>count; State of the Union addresses 1993-2021 (CC0)\n")
        for p, n, c in bi:
            f.write(f"{p}\t{n}\t{c}\n")
    print(f"{len(uni)} unigrams, {len(bi)} bigrams")


if __name__ == "__main__":
    main()
