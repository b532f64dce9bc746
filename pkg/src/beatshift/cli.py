"""Command-line entry point.

    beatshift eval --det det.txt --ann ann.txt [--format text|json|csv] [--svg fig.svg]
    beatshift corpus --det-dir dets/ --ann-dir anns/ [--parallel 4] [--strict]

Failures print one JSON line on stderr and exit with a code that names the
failure class (see ``EXIT_CODES``).
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .core import (
    ALL_VARIATIONS,
    DEFAULT_INNER,
    DEFAULT_OUTER,
    EvalConfig,
    InvalidInputError,
    InvalidWindowError,
    MatchingMode,
    SizeLimitError,
    VariationKind,
)
from .formats import BeatParseError, REPORT_FORMATS, pair_corpus, read_beats, write_report
from .svg import render_comparison_svg
from .variations import evaluate_all_variations

EXIT_CODES = {
    "usage": 2,
    "missing_file": 3,
    "parse_error": 4,
    "invalid_window": 5,
    "io_error": 6,
    "size_limit": 7,
}


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.code = EXIT_CODES[kind]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


def _variation_list(text: str) -> tuple[VariationKind, ...]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    if names == ["all"]:
        return ALL_VARIATIONS
    try:
        return tuple(VariationKind(n) for n in names)
    except ValueError:
        choices = ", ".join(k.value for k in ALL_VARIATIONS)
        raise argparse.ArgumentTypeError(f"unknown variation in {text!r}; choose from {choices}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--inner-window", type=float, default=DEFAULT_INNER, metavar="S",
                        help="inner tolerance half-width in seconds; a detection this close "
                             "to an annotation is a true positive (default: 0.070 = +-70 ms)")
    common.add_argument("--outer-window", type=float, default=DEFAULT_OUTER, metavar="S",
                        help="outer tolerance half-width in seconds; misplaced detections "
                             "this close are shifted instead of deleted and re-inserted "
                             "(default: 1.0 = +-1 s)")
    common.add_argument("--variations", type=_variation_list, default=ALL_VARIATIONS,
                        metavar="LIST",
                        help="comma-separated detection variations to evaluate: "
                             + ",".join(k.value for k in ALL_VARIATIONS) + " (default: all)")
    common.add_argument("--matching", choices=[m.value for m in MatchingMode], default="greedy",
                        help="greedy shift assignment or exhaustive optimum for small "
                             "instances (default: greedy)")
    common.add_argument("--format", choices=REPORT_FORMATS, default="text",
                        help="report format (default: text)")
    common.add_argument("-o", "--output", type=Path,
                        help="write the report here instead of stdout")

    parser = _Parser(prog="beatshift",
                     description="Count the shifts, insertions and deletions needed to "
                                 "correct beat detections against annotations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_eval = sub.add_parser("eval", parents=[common], help="evaluate one detection/annotation pair")
    p_eval.add_argument("--det", type=Path, required=True, help="detection beat file")
    p_eval.add_argument("--ann", type=Path, required=True, help="annotation beat file")
    p_eval.add_argument("--svg", type=Path, help="write a comparison figure of all variations")

    p_corpus = sub.add_parser("corpus", parents=[common],
                              help="evaluate every file pair shared by two directories")
    p_corpus.add_argument("--det-dir", type=Path, required=True, help="directory of detection files")
    p_corpus.add_argument("--ann-dir", type=Path, required=True, help="directory of annotation files")
    p_corpus.add_argument("--svg", type=Path,
                          help="directory to write one comparison figure per pair")
    p_corpus.add_argument("--parallel", type=int, default=1, metavar="N",
                          help="evaluate up to N pairs concurrently (default: 1)")
    p_corpus.add_argument("--strict", action="store_true",
                          help="abort on the first unparseable file instead of skipping the pair")
    return parser


def _config(args) -> EvalConfig:
    try:
        return EvalConfig(
            inner_half_width=args.inner_window,
            outer_half_width=args.outer_window,
            matching_mode=MatchingMode(args.matching),
            variation_kinds=args.variations,
        )
    except InvalidWindowError as e:
        raise CliError("invalid_window", str(e)) from None


def _read(path: Path):
    try:
        return read_beats(path)
    except (BeatParseError, InvalidInputError) as e:
        raise CliError("parse_error", str(e)) from None
    except UnicodeDecodeError as e:
        raise CliError("parse_error", f"{path}: {e}") from None
    except OSError as e:
        raise CliError("io_error", f"{path}: {e}") from None


def _emit(text: str, output, stdout) -> None:
    if output is None:
        stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _warn(messages, stderr) -> None:
    for m in messages:
        stderr.write(f"warning: {m}\n")


def cmd_eval(args, stdout, stderr) -> int:
    config = _config(args)
    for p in (args.det, args.ann):
        if not p.is_file():
            raise CliError("missing_file", f"{p}: no such file")
    det, ann = _read(args.det), _read(args.ann)
    _warn(det.warnings + ann.warnings, stderr)
    try:
        outcome = evaluate_all_variations(det.sequence, ann.sequence, config)
    except SizeLimitError as e:
        raise CliError("size_limit", str(e)) from None
    _emit(write_report({args.det.stem: outcome}, args.format), args.output, stdout)
    if args.svg is not None:
        args.svg.write_text(render_comparison_svg(outcome.results, ann.sequence, config),
                            encoding="utf-8")
    return 0


def _evaluate_pair(pair, config):
    """Worker for one corpus pair: ``(id, outcome, warnings, error)``."""
    try:
        det, ann = read_beats(pair.detection_path), read_beats(pair.annotation_path)
    except (BeatParseError, InvalidInputError, UnicodeDecodeError) as e:
        return pair.id, None, (), str(e)
    outcome = evaluate_all_variations(det.sequence, ann.sequence, config)
    return pair.id, (outcome, ann.sequence), det.warnings + ann.warnings, None


def cmd_corpus(args, stdout, stderr) -> int:
    config = _config(args)
    for d in (args.det_dir, args.ann_dir):
        if not d.is_dir():
            raise CliError("missing_file", f"{d}: no such directory")
    try:
        pairs, warnings = pair_corpus(args.det_dir, args.ann_dir)
    except OSError as e:
        raise CliError("io_error", str(e)) from None
    _warn(warnings, stderr)

    try:
        if args.parallel > 1 and len(pairs) > 1:
            with ProcessPoolExecutor(max_workers=args.parallel) as pool:
                done = list(pool.map(_evaluate_pair, pairs, [config] * len(pairs)))
        else:
            done = [_evaluate_pair(p, config) for p in pairs]
    except SizeLimitError as e:
        raise CliError("size_limit", str(e)) from None

    results = {}
    figures = {}
    for pid, payload, pair_warnings, error in done:
        _warn(pair_warnings, stderr)
        if error is not None:
            if args.strict:
                raise CliError("parse_error", error)
            _warn([f"{error} (pair {pid!r} skipped)"], stderr)
            continue
        results[pid], figures[pid] = payload
    _emit(write_report(results, args.format, allow_empty=True), args.output, stdout)

    if args.svg is not None:
        args.svg.mkdir(parents=True, exist_ok=True)
        for pid in sorted(results):
            svg = render_comparison_svg(results[pid].results, figures[pid], config)
            (args.svg / f"{pid}.svg").write_text(svg, encoding="utf-8")
    return 0


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        handler = cmd_eval if args.command == "eval" else cmd_corpus
        return handler(args, stdout, stderr)
    except CliError as e:
        stderr.write(json.dumps({"error": e.kind, "exit_code": e.code, "message": str(e)}) + "\n")
        return e.code
    except OSError as e:
        stderr.write(json.dumps({"error": "io_error", "exit_code": EXIT_CODES["io_error"],
                                 "message": str(e)}) + "\n")
        return EXIT_CODES["io_error"]


if __name__ == "__main__":
    sys.exit(main())
