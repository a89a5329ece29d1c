import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import expanded_weights, flatten_runs, naive_product, random_runs
from shiftlab.errors import FormatError, IndexBeyondMaterialized
from shiftlab.verdict import Status
from shiftlab.weights import (
    ExactPow2,
    GeneralWeights,
    LogSpace,
    RunLengthWeights,
    Segment,
    is_surjective_shift,
    partial_product_general,
    weights_from_json,
)

run_lists = st.lists(st.tuples(st.integers(-3, 3), st.integers(1, 7)), min_size=1, max_size=12)


# -- the constructed sequence -----------------------------------------------


def test_first_weights(w13):
    assert w13.weight_at(0) == -1
    assert w13.weight_at(1) == 1
    assert [w13.weight_at(n) for n in range(5)] == [-1, 1, -1, 1, 1]


def test_index_past_end(w13):
    with pytest.raises(IndexBeyondMaterialized):
        w13.weight_at(w13.total_length)


def test_products_from_hand_enumeration(w13):
    assert w13.partial_product(1, 2) == ExactPow2(0)
    assert w13.partial_product(1, 0) == ExactPow2(0)
    assert w13.partial_product(3, 2) == ExactPow2(2)


def test_product_past_end(w13):
    with pytest.raises(IndexBeyondMaterialized):
        w13.partial_product(1, w13.total_length)
    with pytest.raises(ValueError):
        w13.partial_product(0, 3)


def test_products_against_expansion_depth9(state13):
    exps = expanded_weights(9)
    w = state13.weights
    rng = random.Random(5)
    for _ in range(3000):
        i = rng.randint(1, len(exps) - 1)
        j = rng.randint(0, len(exps) - i)
        assert w.partial_product(i, j).exponent == naive_product(exps, i, j)


def test_prefix_tables_round_trip(w13):
    total = 0
    counts, exps = [], []
    for seg in w13.segments:
        total_len = (counts[-1] if counts else 0) + seg.length
        total += seg.total_exp
        counts.append(total_len)
        exps.append(total)
    assert counts == w13.prefix_counts
    assert exps == w13.prefix_exponents
    assert all(a < b for a, b in zip(counts, counts[1:]))


# -- arbitrary run-length sequences ------------------------------------------


@given(run_lists, st.data())
def test_products_match_naive_loop(runs, data):
    w = RunLengthWeights.from_runs(runs)
    flat = flatten_runs(runs)
    i = data.draw(st.integers(1, max(1, len(flat) - 1)))
    if i >= len(flat):
        return
    j = data.draw(st.integers(0, len(flat) - i))
    assert w.partial_product(i, j).exponent == naive_product(flat, i, j)


@given(run_lists, st.data())
def test_exponent_additivity(runs, data):
    w = RunLengthWeights.from_runs(runs)
    n = w.total_length
    if n < 2:
        return
    i = data.draw(st.integers(1, n - 1))
    j = data.draw(st.integers(0, n - i))
    k = data.draw(st.integers(0, n - i - j))
    assert w.partial_product(i, j + k) == w.partial_product(i, j) * w.partial_product(i + j, k)


@given(run_lists)
def test_runs_are_not_merged(runs):
    w = RunLengthWeights.from_runs(runs)
    assert list(w.runs) == runs
    assert w.run_count() == len(runs)


def test_repeated_segment_matches_expansion():
    seg = Segment(((0, 3), (-1, 1), (2, 2)), 5)
    w = RunLengthWeights([Segment(((1, 1),), 1), seg])
    flat = [1] + [0, 0, 0, -1, 2, 2] * 5
    for i in range(1, len(flat)):
        for j in range(len(flat) - i + 1):
            assert w.partial_product(i, j).exponent == sum(flat[i:i + j])
    assert [w.weight_at(n) for n in range(len(flat))] == flat


def test_summaries_match_expansion():
    rng = random.Random(11)
    for _ in range(50):
        runs = random_runs(rng)
        w = RunLengthWeights.from_runs(runs)
        flat = flatten_runs(runs)
        lo = rng.randrange(len(flat))
        hi = rng.randint(lo + 1, len(flat))
        s = w.summarize(lo, hi)
        part = flat[lo:hi]
        pre = [sum(part[:e]) for e in range(1, len(part) + 1)]
        assert s.total == sum(part)
        assert s.pre_min[0] == min(pre) and s.pre_max[0] == max(pre)


# -- general weights ------------------------------------------------------------


def test_general_all_ones():
    g = GeneralWeights(["1"] * 20)
    p = partial_product_general(g, 3, 10)
    assert isinstance(p, LogSpace) and p.log2_value == 0.0 and p.rel_err_bound < 1e-12


def test_general_all_twos():
    g = GeneralWeights([2] * 20)
    assert partial_product_general(g, 1, 10).log2_value == 10.0


def test_general_telescoping():
    g = GeneralWeights([1] + [Fraction(n + 1, n) for n in range(1, 600)])
    for n in (1, 7, 100, 599):
        p = partial_product_general(g, 1, n)
        assert abs(p.log2_value - math.log2(n + 1)) <= p.log2_err
        assert p.rel_err_bound <= 1e-10


def test_general_beyond_horizon():
    g = GeneralWeights([1, 2, 3, 4], declared_horizon=2)
    with pytest.raises(IndexBeyondMaterialized):
        g.weight_at(3)
    with pytest.raises(IndexBeyondMaterialized):
        partial_product_general(g, 2, 2)


def test_general_rejects_nonpositive():
    with pytest.raises(ValueError):
        GeneralWeights([1, 0, 2])


# -- surjectivity ---------------------------------------------------------------


def test_surjective_construction(w13):
    v = is_surjective_shift(w13)
    assert v.status is Status.HOLDS_WITH_BOUND
    assert v.witness["sup_inverse_weight"] == 2


def test_surjective_all_ones():
    v = is_surjective_shift(RunLengthWeights.constant(0, 50))
    assert v.status is Status.HOLDS_WITH_BOUND and v.witness["sup_inverse_weight"] == 1


def test_surjective_decaying_general():
    g = GeneralWeights([Fraction(1, n + 1) for n in range(101)])
    v = is_surjective_shift(g)
    assert v.status is Status.EVIDENCE_AGAINST
    assert v.witness["min_value"] == Fraction(1, 101)
    assert "finite-horizon" in v.flags


# -- file format ----------------------------------------------------------------


def test_json_round_trip(state13):
    w = state13.weights
    back = weights_from_json(json.loads(json.dumps(w.to_json())))
    assert back.total_length == w.total_length
    for i, j in ((1, 20), (5, 10**6), (420, 15632744610), (1, w.total_length - 1)):
        assert back.partial_product(i, j) == w.partial_product(i, j)


def test_json_runs_form():
    w = weights_from_json({"kind": "dyadic_runs", "runs": [[1, "3"], [-1, 2]]})
    assert [w.weight_at(n) for n in range(5)] == [1, 1, 1, -1, -1]
    assert weights_from_json(w.to_json()).to_json() == w.to_json()


def test_json_general():
    g = weights_from_json({"kind": "general", "values": ["1/2", "3", "5/4"], "horizon": "1"})
    assert isinstance(g, GeneralWeights) and g.total_length == 2


@pytest.mark.parametrize("bad", [
    [],
    {"kind": "dyadic_runs"},
    {"kind": "dyadic_runs", "runs": [[1, 0]]},
    {"kind": "dyadic_runs", "runs": [[1, "x"]]},
    {"kind": "dyadic_runs", "runs": [[1]]},
    {"kind": "general", "values": ["1/0"]},
    {"kind": "general", "values": ["-1"]},
    {"kind": "other"},
])
def test_json_malformed(bad):
    with pytest.raises(FormatError):
        weights_from_json(bad)
