#!/usr/bin/env python3
"""Reference hashed feature vector for the golden document.

Pipeline: tokenize, drop tokens below min_count in the document's own
frequency table, uni- and bigrams, xxh64 index/sign, sum, L2 normalize.

  vectorize_oracle.py write  OUT.tsv   regenerate the golden file
  vectorize_oracle.py check  OUT.tsv   exit 1 if the file disagrees
"""
import math
import sys
from collections import Counter

import xxhash

from tokenize_oracle import tokenize

TEXT = ("Reise nach Italien. Die Reise begann in Wien, und der Weg nach Venedig war lang. "
        "In Venedig sahen wir die Kirche, in Wien den Dom; der Weg zurück war kürzer.")
DIM = 1 << 20
MIN_COUNT = 2


def vectorize(text):
    toks = tokenize(text)
    freq = Counter(toks)
    kept = [t for t in toks if freq[t] >= MIN_COUNT]
    grams = []
    for i in range(len(kept)):
        grams.append(kept[i])
        if i + 1 < len(kept):
            grams.append(kept[i] + " " + kept[i + 1])
    acc = Counter()
    for g in grams:
        h = xxhash.xxh64(g.encode("utf-8")).intdigest()
        acc[h & (DIM - 1)] += -1 if h >> 63 else 1
    acc = {k: v for k, v in acc.items() if v != 0}
    norm = math.sqrt(sum(v * v for v in acc.values()))
    return sorted((k, v / norm) for k, v in acc.items())


def render(vec):
    return "".join(f"{k}\t{w:.17g}\n" for k, w in vec)


def main(mode, path):
    text = render(vectorize(TEXT))
    if mode == "write":
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return 0
    with open(path, encoding="utf-8") as f:
        stored = f.read()
    if stored != text:
        print("golden vector file disagrees with the oracle", file=sys.stderr)
        return 1
    print(f"{text.count(chr(10))} entries match")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
