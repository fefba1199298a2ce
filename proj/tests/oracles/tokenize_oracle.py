#!/usr/bin/env python3
"""Independent tokenizer reference built on Python's unicodedata.

Checks every row of the golden table: split on code points that are neither
letters (L*) nor decimal digits (Nd), keep combining marks (M*) inside a
token already in progress, lowercase per code point, drop tokens with fewer
than two letters/digits.
"""
import sys
import unicodedata


def is_alnum(ch):
    cat = unicodedata.category(ch)
    return cat.startswith("L") or cat == "Nd"


def is_mark(ch):
    return unicodedata.category(ch).startswith("M")


def lower1(ch):
    low = ch.lower()
    # simple (single code point) mapping only
    return low if len(low) == 1 else ch


def tokenize(text):
    out, cur, alnum = [], [], 0
    for ch in text:
        if is_alnum(ch):
            cur.append(lower1(ch))
            alnum += 1
        elif is_mark(ch) and cur:
            cur.append(ch)
        else:
            if alnum >= 2:
                out.append("".join(cur))
            cur, alnum = [], 0
    if alnum >= 2:
        out.append("".join(cur))
    return out


def main(path):
    failures = 0
    rows = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            text, expected = line.split("\t")
            rows += 1
            got = tokenize(text)
            want = expected.split(" ") if expected else []
            if got != want:
                failures += 1
                print(f"mismatch for {text!r}: oracle {got}, table {want}")
    print(f"{rows} rows, {failures} mismatches")
    return 1 if failures or rows < 30 else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
