#!/usr/bin/env python3
"""Walkthrough: load the threat-technique corpus, build the deterministic
lexical index, and run a few queries.

The embedder is fully deterministic (TF-IDF weights hashed into 1024
buckets with FNV-1a, L2-normalized), so every run of this script prints
identical scores.
"""

from ranshield.evalkit import load_default_kb


def main():
    corpus, index = load_default_kb()
    print(f"corpus {corpus.version}: {len(corpus)} techniques, "
          f"index dimension {index.dimension}\n")

    queries = [
        "UE negotiated null ciphering nea0 and null integrity nia0",
        "rogue base station broadcasting a stronger signal",
        "IMSI exposed in downlink paging",
        "random access channel flooded with preambles",
    ]
    for q in queries:
        print(f"query: {q}")
        for r in index.search(q, 3):
            t = corpus.get_technique(r.technique_id)
            print(f"  {r.rank}. {r.technique_id:<12} {r.score:.4f}  {t.name}")
        print()

    t = corpus.get_technique("FGT1600.501")
    print(f"technique {t.technique_id}: {t.name}")
    for m in t.mitigations:
        print(f"  mitigation {m.mitigation_id}: {m.name}")
        print(f"    {m.guidance}")


if __name__ == "__main__":
    main()
