"""Metrical-level variations of a detection sequence.

Rather than varying the annotations, the detections are varied globally
(doubled, moved to the off-beat, halved) and each variant is then corrected
locally. The global step itself is not priced; only the local operations
enter the efficiency score.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .core import (
    BeatSequence,
    EvalConfig,
    EvalResult,
    MatchingMode,
    SequenceLike,
    VariationKind,
    as_sequence,
    evaluate,
)
from .exhaustive import evaluate_exhaustive


def _midpoints(times: tuple[float, ...]) -> list[float]:
    return [(a + b) / 2 for a, b in zip(times, times[1:])]


def generate_variation(dets: SequenceLike, kind: VariationKind) -> BeatSequence:
    """Apply one global metrical transformation.

    ``double`` interleaves consecutive midpoints with the originals,
    ``offbeat`` keeps only the midpoints, and the two ``half`` kinds keep
    every other beat starting from the first or second one. Sequences of
    fewer than two beats have no midpoints: ``double`` returns them as-is
    and ``offbeat`` returns an empty sequence.
    """
    times = as_sequence(dets).times
    kind = VariationKind(kind)
    if kind is VariationKind.ORIGINAL:
        return BeatSequence(times)
    if kind is VariationKind.DOUBLE:
        out = []
        for t, mid in zip(times, _midpoints(times)):
            out += [t, mid]
        out += times[-1:]
        return BeatSequence(tuple(out))
    if kind is VariationKind.OFFBEAT:
        return BeatSequence(tuple(_midpoints(times)))
    if kind is VariationKind.HALF_ODD:
        return BeatSequence(times[0::2])
    return BeatSequence(times[1::2])


@dataclass(frozen=True)
class VariationResult:
    kind: VariationKind
    varied: BeatSequence
    result: EvalResult


class VariationOutcome(NamedTuple):
    results: tuple[VariationResult, ...]
    best: Optional[VariationKind]

    def get(self, kind: VariationKind) -> VariationResult:
        for vr in self.results:
            if vr.kind is VariationKind(kind):
                return vr
        raise KeyError(kind)


def _evaluate_one(kind, dets, anns, config) -> VariationResult:
    varied = generate_variation(dets, kind)
    run = evaluate_exhaustive if config.matching_mode is MatchingMode.EXHAUSTIVE else evaluate
    return VariationResult(kind, varied, run(varied, anns, config))


def evaluate_all_variations(dets: SequenceLike, anns: SequenceLike,
                            config: Optional[EvalConfig] = None,
                            workers: int = 1) -> VariationOutcome:
    """Evaluate every configured variation and pick the most efficient one.

    Ties on annotation efficiency keep the earliest kind in listing order,
    so ``original`` wins whenever nothing beats it.
    """
    config = EvalConfig() if config is None else config
    dets, anns = as_sequence(dets), as_sequence(anns)
    kinds = config.variation_kinds
    if workers > 1 and len(kinds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = tuple(pool.map(lambda k: _evaluate_one(k, dets, anns, config), kinds))
    else:
        results = tuple(_evaluate_one(k, dets, anns, config) for k in kinds)
    best = None
    best_ae = -1.0
    for vr in results:
        if vr.result.annotation_efficiency > best_ae:
            best, best_ae = vr.kind, vr.result.annotation_efficiency
    return VariationOutcome(results, best)
