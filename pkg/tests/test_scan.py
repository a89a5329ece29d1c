import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import expanded_weights, flatten_runs, prefix_sums
from shiftlab.errors import IndexBeyondMaterialized, ScanBudgetExceeded
from shiftlab.scan import window_min, window_min_pointwise
from shiftlab.weights import RunLengthWeights, Segment


def flat_min(exps, n, lo, hi):
    p = prefix_sums(exps)
    return min((p[i + n] - p[i], i) for i in range(lo, hi + 1))


@settings(max_examples=300)
@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(1, 8)), min_size=1, max_size=15), st.data())
def test_scan_matches_flat_oracle(runs, data):
    w = RunLengthWeights.from_runs(runs)
    exps = flatten_runs(runs)
    n = data.draw(st.integers(0, len(exps) - 1))
    lo = data.draw(st.integers(0, len(exps) - n))
    hi = data.draw(st.integers(lo, len(exps) - n))
    val, arg, cnt = window_min(w, n, lo, hi)
    assert (val, arg) == flat_min(exps, n, lo, hi)
    assert cnt == hi - lo + 1


def test_scan_on_repeated_segments():
    rng = random.Random(3)
    for _ in range(200):
        segs = []
        for _ in range(rng.randint(1, 4)):
            pattern = tuple((rng.randint(-1, 1), rng.randint(1, 5)) for _ in range(rng.randint(1, 3)))
            segs.append(Segment(pattern, rng.randint(1, 6)))
        w = RunLengthWeights(segs)
        exps = [w.weight_at(t) for t in range(w.total_length)]
        n = rng.randint(0, len(exps) - 1)
        lo = rng.randint(0, len(exps) - n)
        hi = rng.randint(lo, len(exps) - n)
        assert window_min(w, n, lo, hi)[:2] == flat_min(exps, n, lo, hi)


def test_scan_matches_pointwise_on_construction(state13):
    w = state13.weights
    exps = expanded_weights(9)
    for n in (4, 20, 420):
        for lo, hi in ((1, 2000), (400, 30000), (1, 88410 - n)):
            assert window_min(w, n, lo, hi) == window_min_pointwise(w, n, lo, hi)
            assert window_min(w, n, lo, hi)[:2] == flat_min(exps, n, lo, hi)


def test_window_past_end(w13):
    with pytest.raises(IndexBeyondMaterialized):
        window_min(w13, 10, w13.total_length - 5, w13.total_length - 5)


def test_budget():
    w = RunLengthWeights.from_runs([(1, 1), (-1, 1)] * 500)
    with pytest.raises(ScanBudgetExceeded):
        window_min(w, 3, 0, 900, budget=10)
