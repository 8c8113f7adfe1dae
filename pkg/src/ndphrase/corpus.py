"""Pair datasets (JSON lines) and prediction files (``id<TAB>label``)."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import FormatError, IdMismatch

LABELS = ("yes", "no", "unknown")


@dataclass(frozen=True)
class PairRecord:
    id: str
    premise: str
    hypothesis: str
    gold: str | None = None


def parse_dataset(text):
    out, seen = [], set()
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"not a JSON record: {exc.msg}", n) from exc
        if not isinstance(rec, dict):
            raise FormatError("record is not an object", n)
        missing = [k for k in ("id", "premise", "hypothesis") if k not in rec]
        if missing:
            raise FormatError(f"missing field(s) {', '.join(missing)}", n)
        pid = str(rec["id"])
        if pid in seen:
            raise FormatError(f"duplicate id {pid!r}", n)
        seen.add(pid)
        gold = rec.get("gold")
        if gold is not None and gold not in LABELS:
            raise FormatError(f"bad gold label {gold!r}", n)
        out.append(PairRecord(pid, rec["premise"], rec["hypothesis"], gold))
    return out


def load_dataset(path):
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh.read())


def dump_dataset(records):
    lines = []
    for r in records:
        rec = {"id": r.id, "premise": r.premise, "hypothesis": r.hypothesis}
        if r.gold is not None:
            rec["gold"] = r.gold
        lines.append(json.dumps(rec, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")


def dump_predictions(pairs):
    return "".join(f"{pid}\t{label}\n" for pid, label in pairs)


def parse_predictions(text):
    out = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1] not in LABELS:
            raise FormatError(f"expected 'id<TAB>label', got {line!r}", n)
        out.append((parts[0], parts[1]))
    return out


def load_predictions(path):
    with open(path, encoding="utf-8") as fh:
        return parse_predictions(fh.read())


def align_ids(predictions, records):
    """Pairs (gold, predicted) in dataset order; ids must match exactly."""
    pred = dict(predictions)
    if len(pred) != len(predictions):
        raise IdMismatch("duplicate ids in predictions")
    gold = {r.id: r.gold for r in records}
    if set(pred) != set(gold):
        extra = sorted(set(pred) - set(gold))
        absent = sorted(set(gold) - set(pred))
        raise IdMismatch(f"ids differ: unexpected {extra[:5]}, missing {absent[:5]}")
    if any(g is None for g in gold.values()):
        raise IdMismatch("gold labels missing from the dataset")
    return [(r.gold, pred[r.id]) for r in records]
