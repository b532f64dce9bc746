"""Shift-aware beat tracking evaluation: count the shifts, insertions and
deletions that turn detections into annotations, and score the effort."""

from .core import (
    ALL_VARIATIONS,
    BeatSequence,
    Counts,
    EvalConfig,
    EvalResult,
    InconsistentLedgerError,
    InvalidInputError,
    InvalidWindowError,
    MatchingMode,
    OpKind,
    Operation,
    OperationLedger,
    SizeLimitError,
    VariationKind,
    annotation_efficiency,
    apply_operations,
    assign_shifts,
    direct_f_measure,
    evaluate,
    f_measure,
    match_true_positives,
    transformation_curve,
)
from .exhaustive import evaluate_exhaustive
from .formats import (
    BeatFile,
    BeatParseError,
    CorpusPair,
    UnsupportedFormatError,
    format_beats,
    pair_corpus,
    parse_beats,
    read_beats,
    write_report,
)
from .svg import InvalidSpecError, VizSpec, render_comparison_svg, render_svg
from .variations import VariationOutcome, VariationResult, evaluate_all_variations, generate_variation

__version__ = "0.1.0"
