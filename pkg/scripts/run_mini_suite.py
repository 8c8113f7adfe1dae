"""Extract axioms from the mini training pairs, then classify the mini
suite in every mode and print a score table."""

import argparse
import tempfile
from pathlib import Path

from ndphrase.cli import main as cli
from ndphrase.config import MODES
from ndphrase.corpus import align_ids, load_dataset, load_predictions
from ndphrase.metrics import compute_metrics

MINI = Path(__file__).resolve().parent.parent / "data" / "mini"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    records = load_dataset(MINI / "suite.jsonl")
    with tempfile.TemporaryDirectory() as tmp:
        axioms = Path(tmp) / "axioms.txt"
        cli(["extract", "--dataset", str(MINI / "train.jsonl"),
             "--relations", str(MINI / "relations.tsv"), "--out", str(axioms)])
        print(axioms.read_text())
        for mode in MODES:
            out = Path(tmp) / f"pred-{mode}.tsv"
            cli(["classify", "--dataset", str(MINI / "suite.jsonl"),
                 "--relations", str(MINI / "relations.tsv"), "--axioms", str(axioms),
                 "--mode", mode, "--jobs", str(args.jobs), "--out", str(out)])
            m = compute_metrics(align_ids(load_predictions(out), records))
            correct = sum(m.confusion[c][c] for c in m.confusion)
            print(f"mode={mode:8s} correct={correct}/{m.total} "
                  f"precision={float(m.precision):.3f} recall={float(m.recall):.3f}")


if __name__ == "__main__":
    main()
