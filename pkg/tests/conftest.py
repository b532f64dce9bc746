import itertools
from fractions import Fraction

import numpy as np
import pytest

SLACK = 1e-9

# Lines collected by the acceptance module and echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def compatible(d, a, w):
    return abs(d - a) <= w + SLACK


def brute_max_matching(dets, anns, w):
    """Maximum matching size by trying every assignment. Small inputs only."""
    dets, anns = list(dets), list(anns)

    def rec(i, used):
        if i == len(anns):
            return 0
        best = rec(i + 1, used)
        for j, d in enumerate(dets):
            if j not in used and compatible(d, anns[i], w):
                best = max(best, 1 + rec(i + 1, used | {j}))
        return best

    return rec(0, frozenset())


def brute_best_ae(dets, anns, inner, outer):
    """Best annotation efficiency over every partial pairing, as a Fraction."""
    dets, anns = list(dets), list(anns)
    n = len(dets) + len(anns)
    best = None
    for k in range(min(len(dets), len(anns)) + 1):
        for ann_idx in itertools.combinations(range(len(anns)), k):
            for det_idx in itertools.permutations(range(len(dets)), k):
                t = s = 0
                ok = True
                for i, j in zip(ann_idx, det_idx):
                    if compatible(dets[j], anns[i], inner):
                        t += 1
                    elif compatible(dets[j], anns[i], outer):
                        s += 1
                    else:
                        ok = False
                        break
                if not ok:
                    continue
                denom = n - t - s
                ae = Fraction(1) if denom == 0 else Fraction(t, denom)
                best = ae if best is None else max(best, ae)
    return best


def make_instance(rng, max_anns=50, n_anns=None):
    """Annotations at a plausible beat rate, detections derived by jitter,
    deletion and insertion at a randomly chosen density."""
    if n_anns is None:
        n_anns = int(rng.integers(0, max_anns + 1))
    period = rng.uniform(0.3, 0.8)
    anns = np.round(rng.uniform(0, 1) + np.cumsum(rng.uniform(0.8, 1.2, n_anns) * period), 6)
    jitter = rng.choice([0.01, 0.05, 0.15, 0.5])
    p_delete = rng.choice([0.0, 0.1, 0.3, 0.6])
    dets = [a + rng.normal(0, jitter) for a in anns if rng.uniform() >= p_delete]
    span = (anns[-1] + 1.0) if n_anns else 5.0
    extra = int(rng.poisson(rng.choice([0.0, 0.1, 0.5]) * max(n_anns, 2)))
    dets += list(rng.uniform(0, span, extra))
    if rng.uniform() < 0.2:
        # double-time style output: add midpoints
        d = sorted(dets)
        dets += [(x + y) / 2 for x, y in zip(d, d[1:])]
    dets = np.round(np.clip(dets, 0, None), 6)
    return sorted(float(x) for x in dets), sorted(float(x) for x in anns)


def small_instance(rng, max_side=6):
    nd = int(rng.integers(0, max_side + 1))
    na = int(rng.integers(0, max_side + 1))
    span = rng.choice([1.0, 3.0, 6.0])
    dets = sorted(float(x) for x in np.round(rng.uniform(0, span, nd), 3))
    anns = sorted(float(x) for x in np.round(rng.uniform(0, span, na), 3))
    return dets, anns


@pytest.fixture
def rng():
    return np.random.default_rng(20201011)
