"""Command-line driver: ``extract``, ``classify`` and ``report``.

Exit codes: 0 success, 1 unreadable input, 2 some pairs failed.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .config import MODES, EngineConfig
from .corpus import align_ids, dump_predictions, load_dataset, load_predictions
from .errors import EngineError, FormatError, IdMismatch
from .formula import parse_formula
from .knowledge import KnowledgeBase, load_axioms, load_word_relations, save_axioms
from .metrics import compute_metrics
from .prover import Label, classify, extract_from_pair

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2

# per-process state for worker pools
_WORKER = {}


def _init_worker(kb, config):
    _WORKER["kb"] = kb
    _WORKER["config"] = config


def _classify_one(rec):
    kb, config = _WORKER["kb"], _WORKER["config"]
    start = time.perf_counter()
    try:
        p = parse_formula(rec.premise, config)
        h = parse_formula(rec.hypothesis, config)
        label, yes, no = classify(p, h, kb, config)
        truncated = yes.truncated or (no is not None and no.truncated)
        proof = no if label is Label.NO else yes
        trace = proof.trace_text() if label is not Label.UNKNOWN else ""
        error = None
    except EngineError as exc:
        label, truncated, trace, error = Label.UNKNOWN, False, "", f"{type(exc).__name__}: {exc}"
    return {
        "id": rec.id,
        "label": label.value,
        "truncated": truncated,
        "seconds": time.perf_counter() - start,
        "trace": trace,
        "error": error,
    }


def _extract_one(rec):
    kb, config = _WORKER["kb"], _WORKER["config"]
    start = time.perf_counter()
    try:
        p = parse_formula(rec.premise, config)
        h = parse_formula(rec.hypothesis, config)
        axioms = extract_from_pair(p, h, rec.gold, kb, config, pair_id=rec.id)
        error = None
    except EngineError as exc:
        axioms, error = [], f"{type(exc).__name__}: {exc}"
    return {"id": rec.id, "axioms": axioms, "seconds": time.perf_counter() - start,
            "error": error}


def _run(fn, records, kb, config, jobs):
    if jobs <= 1:
        _init_worker(kb, config)
        return [fn(r) for r in records]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                             initargs=(kb, config)) as pool:
        return list(pool.map(fn, records))


def _config(args, **extra):
    return EngineConfig(mode=args.mode, timeout_secs=args.timeout_secs or None, **extra)


def _knowledge(args, with_axioms):
    kb = KnowledgeBase()
    if args.relations:
        load_word_relations(args.relations, kb)
    if with_axioms and getattr(args, "axioms", None):
        load_axioms(args.axioms, kb)
    return kb


def _emit(summary, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def cmd_extract(args):
    try:
        records = load_dataset(args.dataset)
        kb = _knowledge(args, with_axioms=False)
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    config = _config(args)
    usable = [r for r in records if r.gold in ("yes", "no")]
    if not usable:
        print("warning: no yes/no pairs to extract from", file=sys.stderr)
    results = _run(_extract_one, usable, kb, config, args.jobs)
    store = KnowledgeBase()
    failures = []
    for res in results:
        if res["error"]:
            failures.append({"id": res["id"], "error": res["error"]})
            print(f"warning: {res['id']}: {res['error']}", file=sys.stderr)
        store.add_axioms(res["axioms"])
    save_axioms(args.out, store.axioms)
    times = [r["seconds"] for r in results]
    _emit({
        "command": "extract",
        "pairs": len(records),
        "used_pairs": len(usable),
        "proved_pairs": sum(1 for r in results if r["axioms"]),
        "axioms": {"word": len(store.word_axioms), "phrase": len(store.phrase_axioms),
                   "total": len(store.axioms)},
        "seconds_per_pair": {r["id"]: round(r["seconds"], 4) for r in results},
        "mean_seconds": round(statistics.fmean(times), 4) if times else 0.0,
        "failures": failures,
        "out": args.out,
    })
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_classify(args):
    try:
        records = load_dataset(args.dataset)
        kb = _knowledge(args, with_axioms=True)
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    config = _config(args)
    results = _run(_classify_one, records, kb, config, args.jobs)
    predictions = [(r["id"], r["label"]) for r in results]
    text = dump_predictions(predictions)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.trace:
        for r in results:
            sys.stderr.write(f"## {r['id']}\t{r['label']}\n")
            if r["trace"]:
                sys.stderr.write(r["trace"] + "\n")
    failures = [{"id": r["id"], "error": r["error"]} for r in results if r["error"]]
    summary = {
        "command": "classify",
        "mode": config.mode,
        "pairs": len(records),
        "labels": {lab: sum(1 for _, p in predictions if p == lab) for lab in ("yes", "no", "unknown")},
        "truncated": sorted(r["id"] for r in results if r["truncated"]),
        "mean_seconds": round(statistics.fmean(r["seconds"] for r in results), 4) if results else 0.0,
        "failures": failures,
    }
    if records and all(r.gold is not None for r in records):
        summary["metrics"] = compute_metrics(align_ids(predictions, records)).to_dict()
    _emit(summary, sys.stdout if args.out else sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_report(args):
    try:
        records = load_dataset(args.dataset)
        predictions = load_predictions(args.predictions)
        pairs = align_ids(predictions, records)
    except (OSError, FormatError, IdMismatch) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FATAL
    _emit({"command": "report", **compute_metrics(pairs).to_dict()})
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ndphrase",
        description="Entailment proving with word and phrase abduction over event-semantics formulas.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_help):
        p.add_argument("--dataset", required=True, help="JSON-lines pair file")
        p.add_argument("--relations", help="word relation file (source<TAB>target<TAB>kind)")
        p.add_argument("--mode", choices=MODES, default="w2w+p2p")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--timeout-secs", type=float, default=10.0, help="per-pair limit, 0 for none")
        p.add_argument("--out", help=out_help)

    ex = sub.add_parser("extract", help="abduce axioms from labelled pairs")
    common(ex, "axiom file to write")
    ex.set_defaults(func=cmd_extract)

    cl = sub.add_parser("classify", help="label pairs yes/no/unknown")
    common(cl, "prediction file to write (default: stdout)")
    cl.add_argument("--axioms", help="axiom file from 'extract'")
    cl.add_argument("--trace", action="store_true", help="print proof traces to stderr")
    cl.set_defaults(func=cmd_classify)

    rp = sub.add_parser("report", help="score a prediction file")
    rp.add_argument("--dataset", required=True, help="JSON-lines pair file with gold labels")
    rp.add_argument("--predictions", required=True, help="id<TAB>label file")
    rp.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "extract" and not args.out:
        parser.error("extract needs --out")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
