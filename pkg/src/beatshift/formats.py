"""Beat files, corpus pairing and report serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Optional, Union

from .core import ALL_VARIATIONS, BeatSequence, VariationKind
from .variations import VariationOutcome

_SPLIT = re.compile(r"[,\s]+")

REPORT_FORMATS = ("json", "csv", "text")
CSV_COLUMNS = ("id", "variation", "t_plus", "shifts", "false_positives",
               "false_negatives", "ae", "f_measure", "best")


class BeatParseError(ValueError):
    def __init__(self, message: str, line: int, path: Optional[Union[str, Path]] = None):
        where = f"{path}:{line}" if path is not None else f"line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.path = path


class UnsupportedFormatError(ValueError):
    pass


@dataclass(frozen=True)
class BeatFile:
    path: Optional[Path]
    sequence: BeatSequence
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class CorpusPair:
    id: str
    detection_path: Path
    annotation_path: Path


def parse_beats(text: str, path: Optional[Union[str, Path]] = None) -> BeatFile:
    """Parse a plain-text beat list.

    One event per line; the first token (whitespace or comma separated) is
    the time in seconds, any further tokens such as a bar position are
    ignored. Blank lines and ``#`` comments are skipped. Unsorted input is
    sorted and duplicates are kept, each with a warning.
    """
    where = "" if path is None else f"{path}:"
    times = []
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        token = _SPLIT.split(line, maxsplit=1)[0]
        try:
            value = float(token)
        except ValueError:
            raise BeatParseError(f"not a number: {token!r}", lineno, path) from None
        if not math.isfinite(value):
            raise BeatParseError(f"not finite: {token!r}", lineno, path)
        if value < 0:
            raise BeatParseError(f"negative time: {token!r}", lineno, path)
        times.append(value)
        lines.append(lineno)

    warnings = []
    for k in range(1, len(times)):
        if times[k] < times[k - 1]:
            warnings.append(f"{where}line {lines[k]}: out of order, events sorted")
            break
    order = sorted(range(len(times)), key=lambda k: (times[k], lines[k]))
    for prev, cur in zip(order, order[1:]):
        if times[cur] == times[prev]:
            warnings.append(
                f"{where}line {lines[cur]}: duplicate of line {lines[prev]} ({times[cur]!r}), kept")
    sequence = BeatSequence(tuple(times[k] for k in order))
    return BeatFile(None if path is None else Path(path), sequence, tuple(warnings))


def read_beats(path: Union[str, Path]) -> BeatFile:
    path = Path(path)
    return parse_beats(path.read_text(encoding="utf-8"), path)


def format_beats(sequence) -> str:
    """Inverse of :func:`parse_beats`; ``repr`` keeps floats exact."""
    return "".join(f"{t!r}\n" for t in sequence)


def _stems(directory: Path) -> tuple[dict[str, Path], list[str]]:
    found: dict[str, Path] = {}
    warnings = []
    for entry in sorted(os.listdir(directory)):
        p = directory / entry
        if entry.startswith(".") or not p.is_file():
            continue
        if p.stem in found:
            warnings.append(f"{p}: stem {p.stem!r} already provided by {found[p.stem].name}, ignored")
            continue
        found[p.stem] = p
    return found, warnings


def pair_corpus(det_dir: Union[str, Path], ann_dir: Union[str, Path]):
    """Pair detection and annotation files by file stem.

    Returns ``(pairs, warnings)``; pairs are sorted by id and every file
    without a partner yields one warning naming its path.
    """
    det_dir, ann_dir = Path(det_dir), Path(ann_dir)
    dets, w1 = _stems(det_dir)
    anns, w2 = _stems(ann_dir)
    warnings = w1 + w2
    pairs = [CorpusPair(stem, dets[stem], anns[stem]) for stem in sorted(dets.keys() & anns.keys())]
    for stem in sorted(dets.keys() - anns.keys()):
        warnings.append(f"{dets[stem]}: no matching annotation file")
    for stem in sorted(anns.keys() - dets.keys()):
        warnings.append(f"{anns[stem]}: no matching detection file")
    return pairs, warnings


# -- reports -----------------------------------------------------------------

class _Fixed(float):
    """Float that serializes with six decimals in reports."""


def _num(x) -> str:
    return f"{x:.6f}"


class _Operations(tuple):
    """Ledger operations, rendered by :func:`_dump` from a fixed template."""


def _opt(x) -> str:
    return "null" if x is None else _num(x)


def _dump_operations(ops, indent: int) -> str:
    if not ops:
        return "[]"
    pad = "  " * (indent + 1)
    inner = pad + "  "
    records = [
        f'{pad}{{\n{inner}"kind": "{op.kind.value}",\n'
        f'{inner}"detection_time": {_opt(op.detection_time)},\n'
        f'{inner}"annotation_time": {_opt(op.annotation_time)},\n'
        f'{inner}"offset": {_opt(op.offset)}\n{pad}}}'
        for op in ops
    ]
    return "[\n" + ",\n".join(records) + "\n" + "  " * indent + "]"


def _variation_record(vr) -> dict:
    r = vr.result
    c = r.counts
    return {
        "variation": vr.kind.value,
        "t_plus": c.true_positives,
        "shifts": c.shifts,
        "false_positives": c.false_positives,
        "false_negatives": c.false_negatives,
        "ae": _Fixed(r.annotation_efficiency),
        "f_measure": _Fixed(r.f_measure),
        "operations": _Operations(r.ledger.corrections),
    }


def corpus_means(results: Mapping[str, VariationOutcome]) -> dict:
    """Mean annotation efficiency and F-measure per variation, in listing order."""
    sums: dict[VariationKind, list[float]] = {}
    for outcome in results.values():
        for vr in outcome.results:
            acc = sums.setdefault(vr.kind, [0.0, 0.0, 0])
            acc[0] += vr.result.annotation_efficiency
            acc[1] += vr.result.f_measure
            acc[2] += 1
    return {k: (sums[k][0] / sums[k][2], sums[k][1] / sums[k][2])
            for k in ALL_VARIATIONS if k in sums}


@lru_cache(maxsize=4096)
def _str(s: str) -> str:
    return json.dumps(s)


def _scalar(obj) -> str:
    if isinstance(obj, _Fixed):
        return _num(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return _str(obj)
    return json.dumps(obj)


def _dump(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, _Operations):
        return _dump_operations(obj, indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + _str(k) + ": " + (_dump(v, indent + 1) if isinstance(v, (dict, list, tuple))
                                         else _scalar(v))
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [pad + _dump(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar(obj)


def _ordered(results: Mapping[str, VariationOutcome]):
    return [(pid, results[pid]) for pid in sorted(results)]


def write_report(results: Mapping[str, VariationOutcome], format: str = "json",
                 allow_empty: bool = False) -> str:
    """Serialize per-pair variation results as a byte-stable document."""
    if format not in REPORT_FORMATS:
        raise UnsupportedFormatError(f"unsupported report format {format!r}")
    if not results and not allow_empty:
        raise ValueError("no results to report; pass allow_empty=True for an empty corpus")
    ordered = _ordered(results)
    means = corpus_means(results)
    if format == "json":
        doc = {
            "pairs": [
                {
                    "id": pid,
                    "best_variation": None if outcome.best is None else outcome.best.value,
                    "variations": [_variation_record(vr) for vr in outcome.results],
                }
                for pid, outcome in ordered
            ],
            "summary": {
                "pairs": len(ordered),
                "mean_ae": {k.value: _Fixed(v[0]) for k, v in means.items()},
                "mean_f_measure": {k.value: _Fixed(v[1]) for k, v in means.items()},
            },
        }
        return _dump(doc) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for pid, outcome in ordered:
            for vr in outcome.results:
                c = vr.result.counts
                writer.writerow([
                    pid, vr.kind.value, c.true_positives, c.shifts, c.false_positives,
                    c.false_negatives, _num(vr.result.annotation_efficiency),
                    _num(vr.result.f_measure), int(vr.kind is outcome.best),
                ])
        return buf.getvalue()
    return _text_report(ordered, means)


def _text_report(ordered, means) -> str:
    lines = []
    for pid, outcome in ordered:
        lines.append(f"== {pid}")
        lines.append(f"{'variation':<10} {'t+':>4} {'s':>4} {'f+':>4} {'f-':>4} {'ae':>7} {'F':>7}")
        for vr in outcome.results:
            c = vr.result.counts
            mark = "  <- best" if vr.kind is outcome.best else ""
            lines.append(
                f"{vr.kind.value:<10} {c.true_positives:>4} {c.shifts:>4} "
                f"{c.false_positives:>4} {c.false_negatives:>4} "
                f"{vr.result.annotation_efficiency:>7.3f} {vr.result.f_measure:>7.3f}{mark}")
        best = outcome.best
        if best is not None:
            ae = outcome.get(best).result.annotation_efficiency
            lines.append(f"best={best.value} ae={ae:.3f}")
        lines.append("")
    if len(ordered) > 1 or not ordered:
        lines.append(f"== corpus ({len(ordered)} pairs)")
        for kind, (ae, f) in means.items():
            lines.append(f"{kind.value:<10} mean_ae={ae:.3f} mean_F={f:.3f}")
    return "\n".join(lines).rstrip("\n") + "\n"
