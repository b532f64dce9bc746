"""Exhaustive optimum over all one-to-one pairings, for small instances.

This is the reference the greedy procedure is tested against. A pair within
the inner window counts as a true positive, a pair within the outer window
as a shift, and unpaired events become insertions and deletions. Among all
pairings the one with the highest annotation efficiency wins; ties prefer
more true positives, then fewer shifts, then the lexicographically smallest
assignment (annotations ascending, each taking its earliest detection, with
"unpaired" ordered last).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .core import (
    EvalConfig,
    EvalResult,
    OpKind,
    Operation,
    OperationLedger,
    SequenceLike,
    SizeLimitError,
    _within,
    as_sequence,
    result_from_ledger,
)


def _objective(t: int, s: int, n_events: int):
    denom = n_events - t - s
    ae = Fraction(1) if denom == 0 else Fraction(t, denom)
    return (ae, t, -s)


def evaluate_exhaustive(dets: SequenceLike, anns: SequenceLike,
                        config: Optional[EvalConfig] = None) -> EvalResult:
    config = EvalConfig() if config is None else config
    dets, anns = as_sequence(dets), as_sequence(anns)
    n_events = len(dets) + len(anns)
    if n_events > config.max_exhaustive_events:
        raise SizeLimitError(
            f"{n_events} events exceed the exhaustive limit of {config.max_exhaustive_events}")

    # per annotation: (detection index, is true positive) in ascending detection order
    options = [
        [(j, _within(d, a, config.inner_half_width))
         for j, d in enumerate(dets) if _within(d, a, config.outer_half_width)]
        for a in anns
    ]
    n_anns = len(anns)

    @lru_cache(maxsize=None)
    def reachable(i: int, used: int) -> frozenset:
        """All (t, s) totals attainable by annotations i.. given used detections."""
        if i == n_anns:
            return frozenset({(0, 0)})
        out = set(reachable(i + 1, used))
        for j, tp in options[i]:
            if used >> j & 1:
                continue
            for t, s in reachable(i + 1, used | 1 << j):
                out.add((t + 1, s) if tp else (t, s + 1))
        return frozenset(out)

    t_best, s_best = max(reachable(0, 0), key=lambda ts: _objective(*ts, n_events))

    ops = []
    used, t_rem, s_rem = 0, t_best, s_best
    for i, a in enumerate(anns):
        for j, tp in options[i]:
            if used >> j & 1:
                continue
            rest = (t_rem - 1, s_rem) if tp else (t_rem, s_rem - 1)
            if rest in reachable(i + 1, used | 1 << j):
                kind = OpKind.MATCH if tp else OpKind.SHIFT
                ops.append(Operation(kind, dets[j], a))
                used |= 1 << j
                t_rem, s_rem = rest
                break
        else:
            ops.append(Operation(OpKind.INSERT, None, a))
    ops += [Operation(OpKind.DELETE, d, None)
            for j, d in enumerate(dets) if not used >> j & 1]
    reachable.cache_clear()
    return result_from_ledger(dets, OperationLedger.build(ops))
