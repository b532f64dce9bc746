import math

import pytest
from hypothesis import given, settings, strategies as st

from beatshift import (
    BeatSequence,
    Counts,
    EvalConfig,
    InconsistentLedgerError,
    InvalidInputError,
    InvalidWindowError,
    OpKind,
    Operation,
    OperationLedger,
    annotation_efficiency,
    apply_operations,
    assign_shifts,
    direct_f_measure,
    evaluate,
    f_measure,
    match_true_positives,
    transformation_curve,
)

from conftest import brute_max_matching, make_instance, small_instance

HAND_DETS = [1.0, 2.5, 4.5]
HAND_ANNS = [1.0, 2.0, 3.0]


# -- BeatSequence / EvalConfig ----------------------------------------------

def test_sequence_accepts_empty_and_sorted():
    assert len(BeatSequence()) == 0
    assert BeatSequence([0.0, 1.0, 1.0]).times == (0.0, 1.0, 1.0)


@pytest.mark.parametrize("times", [[1.0, 0.5], [-0.1], [math.nan], [math.inf]])
def test_sequence_rejects_invalid(times):
    with pytest.raises(InvalidInputError):
        BeatSequence(times)


@pytest.mark.parametrize("inner, outer", [(0.0, 1.0), (2.0, 1.0), (-1, 1), (0.07, math.inf)])
def test_config_rejects_bad_windows(inner, outer):
    with pytest.raises(InvalidWindowError):
        EvalConfig(inner, outer)


def test_config_defaults():
    cfg = EvalConfig()
    assert cfg.inner_half_width == 0.070
    assert cfg.outer_half_width == 1.0
    assert cfg.max_exhaustive_events == 24
    assert [k.value for k in cfg.variation_kinds] == [
        "original", "double", "offbeat", "half_odd", "half_even"]


# -- match_true_positives ----------------------------------------------------

def test_match_example_partial():
    pairs, ud, ua = match_true_positives([1.00, 2.05, 3.50], [1.00, 2.00, 3.00], 0.07)
    assert set(pairs) == {(1.00, 1.00), (2.05, 2.00)}
    assert ud.times == (3.50,)
    assert ua.times == (3.00,)
    assert brute_max_matching([1.00, 2.05, 3.50], [1.00, 2.00, 3.00], 0.07) == 2


def test_match_identity():
    pairs, ud, ua = match_true_positives([0.5, 1.0, 1.5], [0.5, 1.0, 1.5], 0.07)
    assert len(pairs) == 3 and not ud and not ua


def test_match_empty_detections():
    pairs, ud, ua = match_true_positives([], [1.0], 0.07)
    assert pairs == [] and not ud and ua.times == (1.0,)


def test_match_crowded_window_uses_earliest_unused():
    pairs, _, _ = match_true_positives([1.01, 1.03], [1.00, 1.05], 0.07)
    assert set(pairs) == {(1.01, 1.00), (1.03, 1.05)}
    assert brute_max_matching([1.01, 1.03], [1.00, 1.05], 0.07) == 2


def test_match_window_boundary_is_inclusive():
    pairs, _, _ = match_true_positives([1.07], [1.0], 0.07)
    assert pairs == [(1.07, 1.0)]
    pairs, _, _ = match_true_positives([1.0700011], [1.0], 0.07)
    assert pairs == []


def test_match_is_maximum_on_random_small(rng):
    for _ in range(300):
        dets, anns = small_instance(rng)
        pairs, ud, ua = match_true_positives(dets, anns, 0.07)
        assert len(pairs) == brute_max_matching(dets, anns, 0.07)
        assert len(pairs) + len(ud) == len(dets)
        assert len(pairs) + len(ua) == len(anns)


# -- assign_shifts -----------------------------------------------------------

def test_shift_example_with_unservable_annotation():
    shifts, ld, la = assign_shifts([2.5, 4.5], [2.0, 3.0], 1.0)
    assert shifts == [Operation(OpKind.SHIFT, 2.5, 2.0)]
    assert shifts[0].offset == pytest.approx(-0.5)
    assert ld.times == (4.5,) and la.times == (3.0,)


def test_shift_empty():
    shifts, ld, la = assign_shifts([], [], 1.0)
    assert shifts == [] and not ld and not la


def test_shift_tie_goes_to_earlier_detection():
    shifts, ld, la = assign_shifts([1.5, 2.5], [2.0], 1.0)
    assert shifts == [Operation(OpKind.SHIFT, 1.5, 2.0)]
    assert shifts[0].offset == pytest.approx(0.5)
    assert ld.times == (2.5,) and not la


def test_shift_claims_closest_not_earliest():
    shifts, ld, _ = assign_shifts([1.2, 1.9], [2.0], 1.0)
    assert shifts[0].detection_time == 1.9
    assert ld.times == (1.2,)


def test_shift_never_reuses_detection():
    shifts, ld, la = assign_shifts([2.0], [1.8, 2.2], 1.0)
    assert len(shifts) == 1 and shifts[0].annotation_time == 1.8
    assert la.times == (2.2,) and not ld


# -- metrics -----------------------------------------------------------------

@pytest.mark.parametrize("counts, expected", [
    ((13, 3, 2, 2), 13 / 20),
    ((5, 0, 0, 0), 1.0),
    ((0, 2, 1, 1), 0.0),
    ((1, 1, 1, 1), 0.25),
    ((0, 0, 0, 0), 1.0),
])
def test_annotation_efficiency(counts, expected):
    assert annotation_efficiency(Counts(*counts)) == expected


def test_annotation_efficiency_reported_value():
    assert round(annotation_efficiency(Counts(13, 3, 2, 2)), 3) == 0.650


@pytest.mark.parametrize("counts, expected", [
    ((13, 3, 2, 2), 26 / 36),
    ((7, 0, 0, 0), 1.0),
    ((0, 1, 0, 0), 0.0),
    ((0, 0, 0, 0), 1.0),
])
def test_f_measure(counts, expected):
    assert f_measure(Counts(*counts)) == pytest.approx(expected, abs=1e-12)


def test_counts_reject_negative():
    with pytest.raises(ValueError):
        Counts(-1, 0, 0, 0)


# -- evaluate ------------------------------------------------------------------

def test_evaluate_hand_trace():
    r = evaluate(HAND_DETS, HAND_ANNS)
    assert r.counts == Counts(1, 1, 1, 1)
    assert r.annotation_efficiency == 0.25
    assert r.ledger.operations == (
        Operation(OpKind.MATCH, 1.0, 1.0),
        Operation(OpKind.SHIFT, 2.5, 2.0),
        Operation(OpKind.INSERT, None, 3.0),
        Operation(OpKind.DELETE, 4.5, None),
    )
    assert r.transformed.times == (1.0, 2.0, 3.0)


def test_evaluate_identity():
    anns = [0.5, 1.0, 1.5, 2.0]
    r = evaluate(anns, anns)
    assert r.annotation_efficiency == 1.0 and r.f_measure == 1.0
    assert r.ledger.corrections == ()


def test_evaluate_no_detections():
    r = evaluate([], [1, 2, 3])
    assert r.counts == Counts(0, 0, 0, 3)
    assert r.annotation_efficiency == 0.0
    assert [op.kind for op in r.ledger] == [OpKind.INSERT] * 3


def test_evaluate_both_empty():
    r = evaluate([], [])
    assert r.annotation_efficiency == 1.0 and r.f_measure == 1.0


def test_evaluate_rejects_bad_times():
    with pytest.raises(InvalidInputError):
        evaluate([-1.0], [1.0])
    with pytest.raises(InvalidInputError):
        evaluate([1.0], [math.nan])


def test_duplicate_detections_become_deletions():
    r = evaluate([1.0, 1.0, 1.0], [1.0])
    assert r.counts == Counts(1, 0, 2, 0)
    assert r.transformed.times == (1.0,)


def test_ledger_order_and_partition(rng):
    rank = {OpKind.MATCH: 0, OpKind.SHIFT: 1, OpKind.INSERT: 2, OpKind.DELETE: 3}
    for _ in range(200):
        dets, anns = make_instance(rng)
        r = evaluate(dets, anns)
        kinds = [rank[op.kind] for op in r.ledger]
        assert kinds == sorted(kinds)
        t, s, fp, fn = r.counts.as_tuple()
        assert t + s + fp == len(dets)
        assert t + s + fn == len(anns)


def test_shift_offsets_respect_both_windows(rng):
    cfg = EvalConfig()
    for _ in range(300):
        dets, anns = make_instance(rng)
        for op in evaluate(dets, anns, cfg).ledger.of_kind(OpKind.SHIFT):
            assert cfg.inner_half_width < abs(op.offset) <= cfg.outer_half_width + 1e-9


def test_match_pairs_respect_inner_window(rng):
    for _ in range(200):
        dets, anns = make_instance(rng)
        for op in evaluate(dets, anns).ledger.of_kind(OpKind.MATCH):
            assert abs(op.annotation_time - op.detection_time) <= 0.07 + 1e-9


def test_window_monotonicity(rng):
    for _ in range(200):
        dets, anns = make_instance(rng)
        tps = [evaluate(dets, anns, EvalConfig(w, 1.0)).counts.true_positives
               for w in (0.1, 0.07, 0.05, 0.02, 0.001)]
        assert tps == sorted(tps, reverse=True)


def test_determinism(rng):
    dets, anns = make_instance(rng, n_anns=40)
    assert repr(evaluate(dets, anns).ledger) == repr(evaluate(list(dets), list(anns)).ledger)


# -- apply_operations ---------------------------------------------------------

def test_apply_hand_trace():
    r = evaluate(HAND_DETS, HAND_ANNS)
    assert apply_operations(HAND_DETS, r.ledger).times == (1.0, 2.0, 3.0)


def test_apply_matches_only_keeps_detections():
    ledger = OperationLedger.build([Operation(OpKind.MATCH, 1.0, 1.02)])
    assert apply_operations([1.0, 2.0], ledger).times == (1.0, 2.0)


def test_apply_insertions_into_empty():
    ledger = OperationLedger.build([Operation(OpKind.INSERT, None, 2.0),
                                    Operation(OpKind.INSERT, None, 1.0)])
    assert apply_operations([], ledger).times == (1.0, 2.0)


def test_apply_rejects_foreign_detection():
    ledger = OperationLedger.build([Operation(OpKind.DELETE, 9.0, None)])
    with pytest.raises(InconsistentLedgerError):
        apply_operations([1.0], ledger)


def test_apply_rejects_double_use():
    ledger = OperationLedger.build([Operation(OpKind.DELETE, 1.0, None),
                                    Operation(OpKind.SHIFT, 1.0, 1.5)])
    with pytest.raises(InconsistentLedgerError):
        apply_operations([1.0], ledger)


# -- transformation curve ----------------------------------------------------

def test_curve_hand_trace():
    r = evaluate(HAND_DETS, HAND_ANNS)
    curve = transformation_curve(HAND_DETS, HAND_ANNS, r.ledger)
    assert curve[0][0] is None
    assert [op.kind for op, _ in curve[1:]] == [OpKind.SHIFT, OpKind.INSERT, OpKind.DELETE]
    assert [f for _, f in curve] == pytest.approx([1 / 3, 2 / 3, 6 / 7, 1.0], abs=1e-9)


def test_curve_no_corrections():
    r = evaluate([1.0, 2.0], [1.0, 2.0])
    assert transformation_curve([1.0, 2.0], [1.0, 2.0], r.ledger) == [(None, 1.0)]


def test_curve_rejects_foreign_annotation():
    ledger = OperationLedger.build([Operation(OpKind.INSERT, None, 7.0)])
    with pytest.raises(InconsistentLedgerError):
        transformation_curve([], [1.0], ledger)


def test_curve_shifts_before_insertions_before_deletions():
    dets, anns = [0.2, 3.4, 9.0], [0.0, 1.5, 3.0, 6.0]
    r = evaluate(dets, anns)
    kinds = [op.kind for op, _ in transformation_curve(dets, anns, r.ledger)[1:]]
    assert kinds == sorted(kinds, key=[OpKind.SHIFT, OpKind.INSERT, OpKind.DELETE].index)


# -- hypothesis properties ---------------------------------------------------

times = st.lists(st.floats(0, 30, allow_nan=False).map(lambda x: round(x, 4)), max_size=25)


@settings(max_examples=200, deadline=None)
@given(times, times)
def test_transform_closure_property(dets, anns):
    dets, anns = sorted(dets), sorted(anns)
    r = evaluate(dets, anns)
    if anns:
        assert direct_f_measure(r.transformed, anns) == 1.0
    assert r.transformed == apply_operations(dets, r.ledger)


@settings(max_examples=200, deadline=None)
@given(times, times)
def test_f_measure_matches_direct(dets, anns):
    dets, anns = sorted(dets), sorted(anns)
    r = evaluate(dets, anns)
    assert r.f_measure == direct_f_measure(dets, anns)
