"""Shift-aware beat evaluation.

Detections are compared to annotations in two passes. Detections inside
the inner window of an annotation count as true positives. Leftover
annotations then claim the closest leftover detection inside the outer
window, which becomes a shift. Whatever remains is inserted (annotations)
or deleted (detections). Every step is recorded so the correction can be
replayed, counted and drawn.
"""
from __future__ import annotations

import bisect
import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

# Absolute slack applied to every window comparison.
EPS = 1e-9

DEFAULT_INNER = 0.070
DEFAULT_OUTER = 1.000


class InvalidInputError(ValueError):
    """Raised for event times that are negative, non-finite or unsorted."""


class InvalidWindowError(ValueError):
    """Raised when tolerance half-widths are not 0 < inner <= outer."""


class InconsistentLedgerError(ValueError):
    """Raised when a ledger references events that are not there."""


class SizeLimitError(ValueError):
    """Raised when an instance is too large for exhaustive search."""


@dataclass(frozen=True)
class BeatSequence:
    """Ascending, finite, non-negative event times in seconds."""

    times: tuple[float, ...] = ()

    def __post_init__(self):
        times = tuple(map(float, self.times))
        if all(map(math.isfinite, times)) and (not times or times[0] >= 0) \
                and list(times) == sorted(times):
            object.__setattr__(self, "times", times)
            return
        for i, t in enumerate(times):
            if not math.isfinite(t):
                raise InvalidInputError(f"event {i} is not finite: {t!r}")
            if t < 0:
                raise InvalidInputError(f"event {i} is negative: {t!r}")
            if i and t < times[i - 1]:
                raise InvalidInputError(
                    f"event {i} ({t!r}) precedes event {i - 1} ({times[i - 1]!r})")
        object.__setattr__(self, "times", times)

    @classmethod
    def sorted(cls, times: Iterable[float]) -> "BeatSequence":
        return cls(tuple(sorted(float(t) for t in times)))

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[float]:
        return iter(self.times)

    def __getitem__(self, item):
        return self.times[item]

    def __bool__(self) -> bool:
        return bool(self.times)


SequenceLike = Union[BeatSequence, Sequence[float]]


def as_sequence(times: SequenceLike) -> BeatSequence:
    if isinstance(times, BeatSequence):
        return times
    return BeatSequence(tuple(times))


class MatchingMode(str, enum.Enum):
    GREEDY = "greedy"
    EXHAUSTIVE = "exhaustive"


class VariationKind(str, enum.Enum):
    """Metrical-level variations, in evaluation (and tie-break) order."""

    ORIGINAL = "original"
    DOUBLE = "double"
    OFFBEAT = "offbeat"
    HALF_ODD = "half_odd"
    HALF_EVEN = "half_even"


ALL_VARIATIONS = tuple(VariationKind)


@dataclass(frozen=True)
class EvalConfig:
    inner_half_width: float = DEFAULT_INNER
    outer_half_width: float = DEFAULT_OUTER
    matching_mode: MatchingMode = MatchingMode.GREEDY
    variation_kinds: tuple[VariationKind, ...] = ALL_VARIATIONS
    max_exhaustive_events: int = 24

    def __post_init__(self):
        inner, outer = float(self.inner_half_width), float(self.outer_half_width)
        if not (math.isfinite(inner) and math.isfinite(outer)):
            raise InvalidWindowError("tolerance half-widths must be finite")
        if not 0 < inner <= outer:
            raise InvalidWindowError(
                f"need 0 < inner <= outer, got inner={inner!r}, outer={outer!r}")
        object.__setattr__(self, "inner_half_width", inner)
        object.__setattr__(self, "outer_half_width", outer)
        object.__setattr__(self, "matching_mode", MatchingMode(self.matching_mode))
        kinds = tuple(VariationKind(k) for k in self.variation_kinds)
        # keep listing order regardless of how the caller spelled the set
        object.__setattr__(
            self, "variation_kinds", tuple(k for k in ALL_VARIATIONS if k in kinds))


class OpKind(str, enum.Enum):
    MATCH = "match"
    SHIFT = "shift"
    INSERT = "insert"
    DELETE = "delete"


_KIND_RANK = {OpKind.MATCH: 0, OpKind.SHIFT: 1, OpKind.INSERT: 2, OpKind.DELETE: 3}


@dataclass(frozen=True)
class Operation:
    kind: OpKind
    detection_time: Optional[float] = None
    annotation_time: Optional[float] = None

    @property
    def offset(self) -> Optional[float]:
        """Signed correction ``annotation - detection``; shifts only."""
        if self.kind is not OpKind.SHIFT:
            return None
        return self.annotation_time - self.detection_time

    def sort_key(self) -> tuple:
        anchor = self.detection_time if self.kind is OpKind.DELETE else self.annotation_time
        return (_KIND_RANK[self.kind], anchor,
                -1.0 if self.detection_time is None else self.detection_time)


@dataclass(frozen=True)
class Counts:
    true_positives: int = 0
    shifts: int = 0
    false_positives: int = 0
    false_negatives: int = 0

    def __post_init__(self):
        for name in ("true_positives", "shifts", "false_positives", "false_negatives"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.true_positives, self.shifts, self.false_positives, self.false_negatives)


@dataclass(frozen=True)
class OperationLedger:
    """Operations ordered match, shift, insert, delete; chronological within kind."""

    operations: tuple[Operation, ...] = ()

    @classmethod
    def build(cls, operations: Iterable[Operation]) -> "OperationLedger":
        return cls(tuple(sorted(operations, key=Operation.sort_key)))

    def __iter__(self) -> Iterator[Operation]:
        return iter(self.operations)

    def __len__(self) -> int:
        return len(self.operations)

    def of_kind(self, kind: OpKind) -> tuple[Operation, ...]:
        return tuple(op for op in self.operations if op.kind is kind)

    @property
    def corrections(self) -> tuple[Operation, ...]:
        """Everything except matches, in ledger order."""
        return tuple(op for op in self.operations if op.kind is not OpKind.MATCH)

    def counts(self) -> Counts:
        c = Counter(op.kind for op in self.operations)
        return Counts(c[OpKind.MATCH], c[OpKind.SHIFT], c[OpKind.DELETE], c[OpKind.INSERT])

    def detection_times(self) -> BeatSequence:
        return BeatSequence.sorted(
            op.detection_time for op in self.operations if op.detection_time is not None)


@dataclass(frozen=True)
class EvalResult:
    counts: Counts
    ledger: OperationLedger
    annotation_efficiency: float
    f_measure: float
    transformed: BeatSequence = field(default_factory=BeatSequence)

    @property
    def ae(self) -> float:
        return self.annotation_efficiency


def _within(d: float, a: float, half_width: float) -> bool:
    return abs(d - a) <= half_width + EPS


def match_true_positives(dets: SequenceLike, anns: SequenceLike, inner_half_width: float):
    """Maximum one-to-one pairing of detections and annotations within the inner window.

    Annotations are swept in ascending order, each taking the earliest unused
    detection in its window. All windows have the same width, so this greedy
    sweep is a maximum matching.

    Returns ``(pairs, unmatched_dets, unmatched_anns)`` where ``pairs`` is a
    list of ``(detection, annotation)`` tuples in annotation order.
    """
    dets, anns = as_sequence(dets).times, as_sequence(anns).times
    if not inner_half_width > 0:
        raise InvalidWindowError("inner_half_width must be positive")
    pairs = []
    unmatched_dets = []
    unmatched_anns = []
    j = 0
    n = len(dets)
    for a in anns:
        # detections too early for this annotation are too early for every later one
        while j < n and dets[j] < a - inner_half_width - EPS:
            unmatched_dets.append(dets[j])
            j += 1
        if j < n and dets[j] <= a + inner_half_width + EPS:
            pairs.append((dets[j], a))
            j += 1
        else:
            unmatched_anns.append(a)
    unmatched_dets.extend(dets[j:])
    return pairs, BeatSequence(tuple(unmatched_dets)), BeatSequence(tuple(unmatched_anns))


def assign_shifts(unmatched_dets: SequenceLike, unmatched_anns: SequenceLike,
                  outer_half_width: float):
    """Let each leftover annotation claim its closest leftover detection.

    Annotations are visited in ascending time. Distance ties (within the
    window slack) go to the earlier detection. Returns
    ``(shifts, leftover_dets, leftover_anns)``.
    """
    free = list(as_sequence(unmatched_dets).times)
    leftover_anns = []
    shifts = []
    for a in as_sequence(unmatched_anns):
        pos = bisect.bisect_left(free, a)
        best = None
        for k in (pos - 1, pos):
            if 0 <= k < len(free) and _within(free[k], a, outer_half_width):
                if best is None or abs(free[k] - a) < abs(free[best] - a) - EPS:
                    best = k
        # walk left over equal-time duplicates so the earliest index is claimed
        if best is not None:
            while best > 0 and free[best - 1] == free[best]:
                best -= 1
            shifts.append(Operation(OpKind.SHIFT, free.pop(best), a))
        else:
            leftover_anns.append(a)
    return shifts, BeatSequence(tuple(free)), BeatSequence(tuple(leftover_anns))


def annotation_efficiency(counts: Counts) -> float:
    """``t+ / (t+ + s + f+ + f-)``, or 1.0 when every count is zero."""
    t, s, fp, fn = counts.as_tuple()
    total = t + s + fp + fn
    if total == 0:
        return 1.0
    return t / total


def f_measure(counts: Counts) -> float:
    """Classic F-measure, where each shift costs one false positive and one false negative."""
    t, s, fp, fn = counts.as_tuple()
    denom = 2 * t + (fp + s) + (fn + s)
    if denom == 0:
        return 1.0
    return 2 * t / denom


def direct_f_measure(dets: SequenceLike, anns: SequenceLike,
                     inner_half_width: float = DEFAULT_INNER) -> float:
    """F-measure from maximum matching inside the inner window only."""
    dets, anns = as_sequence(dets), as_sequence(anns)
    pairs, _, _ = match_true_positives(dets, anns, inner_half_width)
    t = len(pairs)
    return f_measure(Counts(t, 0, len(dets) - t, len(anns) - t))


def _check_config(config: Optional[EvalConfig]) -> EvalConfig:
    return EvalConfig() if config is None else config


def result_from_ledger(dets: BeatSequence, ledger: OperationLedger) -> EvalResult:
    counts = ledger.counts()
    return EvalResult(
        counts=counts,
        ledger=ledger,
        annotation_efficiency=annotation_efficiency(counts),
        f_measure=f_measure(counts),
        transformed=apply_operations(dets, ledger),
    )


def evaluate(dets: SequenceLike, anns: SequenceLike,
             config: Optional[EvalConfig] = None) -> EvalResult:
    """Greedy shift-aware evaluation of detections against annotations."""
    config = _check_config(config)
    dets, anns = as_sequence(dets), as_sequence(anns)
    pairs, rest_dets, rest_anns = match_true_positives(dets, anns, config.inner_half_width)
    shifts, left_dets, left_anns = assign_shifts(rest_dets, rest_anns, config.outer_half_width)
    ops = [Operation(OpKind.MATCH, d, a) for d, a in pairs]
    ops += shifts
    ops += [Operation(OpKind.INSERT, None, a) for a in left_anns]
    ops += [Operation(OpKind.DELETE, d, None) for d in left_dets]
    return result_from_ledger(dets, OperationLedger.build(ops))


def apply_operations(dets: SequenceLike, ledger: Union[OperationLedger, Iterable[Operation]]
                     ) -> BeatSequence:
    """Replay a ledger on ``dets``.

    Matched and unreferenced detections stay put, shifted detections move
    onto their annotation, deletions disappear and insertions are added.
    Duplicate times are consumed one occurrence per operation.
    """
    dets = as_sequence(dets)
    available = Counter(dets)
    added = []
    for op in ledger:
        if op.kind is OpKind.INSERT:
            added.append(op.annotation_time)
            continue
        d = op.detection_time
        if d is None or available[d] <= 0:
            raise InconsistentLedgerError(
                f"{op.kind.value} references detection {d!r} not available in the sequence")
        available[d] -= 1
        if op.kind is OpKind.SHIFT:
            added.append(op.annotation_time)
        elif op.kind is OpKind.MATCH:
            added.append(d)
    kept = list(available.elements())
    return BeatSequence.sorted(kept + added)


def _check_annotations(anns: BeatSequence, ledger: OperationLedger) -> None:
    available = Counter(anns)
    for op in ledger:
        if op.annotation_time is None:
            continue
        if available[op.annotation_time] <= 0:
            raise InconsistentLedgerError(
                f"{op.kind.value} references annotation {op.annotation_time!r} "
                "not available in the sequence")
        available[op.annotation_time] -= 1


def transformation_curve(dets: SequenceLike, anns: SequenceLike, ledger: OperationLedger,
                         config: Optional[EvalConfig] = None):
    """F-measure after each correction, applied cumulatively.

    The first entry is ``(None, F)`` for the untouched detections. Shifts
    come first, then insertions, then deletions.
    """
    config = _check_config(config)
    dets, anns = as_sequence(dets), as_sequence(anns)
    _check_annotations(anns, ledger)
    apply_operations(dets, ledger)
    inner = config.inner_half_width
    curve = [(None, direct_f_measure(dets, anns, inner))]
    applied = []
    for op in ledger.corrections:
        applied.append(op)
        current = apply_operations(dets, applied)
        curve.append((op, direct_f_measure(current, anns, inner)))
    return curve
