"""Extract axioms from the hand-encoded fixture pairs and classify them."""

import argparse
import time
from pathlib import Path

from ndphrase.config import EngineConfig
from ndphrase.corpus import load_dataset
from ndphrase.formula import parse_formula
from ndphrase.knowledge import load_word_relations
from ndphrase.prover import classify, extract_from_pair

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", default=str(DATA / "fixtures.jsonl"))
    ap.add_argument("--relations", default=str(DATA / "relations.tsv"))
    args = ap.parse_args()
    kb = load_word_relations(args.relations)
    config = EngineConfig()
    for rec in load_dataset(args.dataset):
        p, h = parse_formula(rec.premise), parse_formula(rec.hypothesis)
        start = time.perf_counter()
        axioms = extract_from_pair(p, h, rec.gold, kb, config, pair_id=rec.id)
        took = time.perf_counter() - start
        label, _, _ = classify(p, h, kb, config)
        print(f"[{rec.id}] gold={rec.gold} classify={label} extract={took:.3f}s")
        for ax in axioms:
            print(f"  {ax.provenance.mode:6s} {ax}")


if __name__ == "__main__":
    main()
