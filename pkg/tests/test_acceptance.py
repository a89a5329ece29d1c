"""Acceptance criteria, one marked test (or group of tests) per criterion.

Run with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``;
either way the terminal summary prints one PASS/FAIL line per criterion.
"""

import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cli_suite import run_suite  # noqa: E402
from oracles import (  # noqa: E402
    S_VALUES,
    battery_entries,
    brute_min_window,
    circ,
    expanded_weights,
    grid_discrepancies,
    random_bits,
    shift_discrepancies,
)
from shiftlab.classifiers import check_hypermixing_condition, check_mixing, min_window  # noqa: E402
from shiftlab.construction import (  # noqa: E402
    build_construction,
    easy_window,
    hard_window,
    recovery_times,
    verify_balance,
    verify_easy_estimate,
    verify_hard_estimate,
)
from shiftlab.exact import ScaledRational, leq_rel  # noqa: E402
from shiftlab.scan import window_min  # noqa: E402
from shiftlab.shifts import (  # noqa: E402
    SpaceNorm,
    SparseVector,
    forward_shift,
    forward_shift_power,
    norm,
    verify_right_inverse,
)
from shiftlab.systems import (  # noqa: E402
    Arc,
    CircleBall,
    Cylinder,
    Doubling,
    Interval,
    RotationSystem,
    Shift,
    Tent,
    covering_time,
    image,
    image_power,
    no_consecutive_returns,
    return_set,
    separation_region,
    strong_transitivity_cover,
)
from shiftlab.verdict import Status  # noqa: E402
from shiftlab.weights import RunLengthWeights  # noqa: E402

F = Fraction
acceptance = pytest.mark.acceptance

# pinned tolerances and budgets
DEPTH = 13
BALANCE_SECONDS = 1.0
EASY_SECONDS = 30.0
HARD_SECONDS = 60.0
EASY_SAMPLES = 10_000
L2_REL_TOL = 1e-12
SUPPORT_BOUND = 1000
THETA = F(305, 987)
RETURN_HORIZON = 900
COVER_DELTA = F(1, 100)
COVER_TARGETS = 64
COVER_HORIZON = 986
PRODUCT_SPAN = 10_000
SHIFT_POWER_MAX = 50
GRID_POINTS = 10_000
REGIONS_PER_SYSTEM = 100
BRUTE_HORIZON = 2000


@pytest.fixture(scope="module")
def battery():
    return [SparseVector(e) for e in battery_entries()]


# ---------------------------------------------------------------------------
# 1


@acceptance(1, "balance identity M_1^{s_{2k+1}} = 1 for k = 1..6 at depth 13, under 1 s")
def test_criterion_1_balance():
    start = time.perf_counter()
    state = build_construction(DEPTH)
    verdicts = [verify_balance(state, k) for k in range(1, 7)]
    elapsed = time.perf_counter() - start
    for v in verdicts:
        assert v.status is Status.HOLDS_EXACTLY and v.witness["exponent"] == 0
    assert elapsed < BALANCE_SECONDS


# ---------------------------------------------------------------------------
# 2


@acceptance(2, "easy estimate M_i^{n_k} >= 1/2: exhaustive for k = 2, 3; sampled for k = 4, 5; under 30 s")
def test_criterion_2_easy_estimate(state13):
    start = time.perf_counter()
    for k in (2, 3):
        n_k = recovery_times(state13, k)[k]
        # every valid i: past s_{2k+1} and with the window inside the weights
        lo, hi = state13.s(2 * k + 1) + 1, state13.total_length - n_k
        v = verify_easy_estimate(state13, k, (lo, hi), method="scan")
        assert v.status is Status.HOLDS_EXACTLY, v.narrative
        assert v.witness["indices_checked"] == hi - lo + 1
        # the same bound on the default window, index by index
        wlo, whi = easy_window(state13, k)
        assert whi - wlo + 1 <= 10**6
        p = verify_easy_estimate(state13, k, (wlo, whi), method="pointwise")
        assert p.status is Status.HOLDS_EXACTLY and p.witness["indices_checked"] == whi - wlo + 1
    for k in (4, 5):
        v = verify_easy_estimate(state13, k, method="sampled", samples=EASY_SAMPLES, seed=0)
        assert v.status is Status.EVIDENCE_FOR, v.narrative
        assert v.witness["indices_checked"] >= EASY_SAMPLES
        assert v.witness["min_exponent"] >= -1
    assert time.perf_counter() - start < EASY_SECONDS


# ---------------------------------------------------------------------------
# 3


@acceptance(3, "hard estimate exponent(M_i^{n_k}) >= k on [1, s_{2k+1}] for k = 2, 3, 4; under 60 s")
def test_criterion_3_hard_estimate(state13):
    start = time.perf_counter()
    for k in (2, 3, 4):
        assert hard_window(state13, k) == (1, S_VALUES[2 * k + 1])
        v = verify_hard_estimate(state13, k, method="pointwise")
        assert v.status is Status.HOLDS_EXACTLY, v.narrative
        assert v.witness["indices_checked"] == S_VALUES[2 * k + 1]
        assert v.witness["min_exponent"] >= k
    assert time.perf_counter() - start < HARD_SECONDS


# ---------------------------------------------------------------------------
# 4


@acceptance(4, "non-mixing: M_1^n = 1 exactly at n in {2, 10, 210, s_9, s_11}")
def test_criterion_4_mixing_witnesses(w13):
    v = check_mixing(w13, S_VALUES[12])
    assert v.status is Status.EVIDENCE_AGAINST
    wit = v.witness["witnesses"]
    assert [w["n"] for w in wit] == [2, 10, 210, S_VALUES[9], S_VALUES[11]]
    assert all(w["exponent"] == 0 for w in wit)
    for w in wit:
        assert w13.partial_product(1, w["n"]).exponent == 0


# ---------------------------------------------------------------------------
# 5


def _decay_ks():
    return [k for k in range(1, 6) if S_VALUES[2 * k + 1] > SUPPORT_BOUND]


@acceptance(5, "decay ||S^{n_k} x|| <= 2^-k ||x|| on the 20-vector battery in l1, l2 and sup")
@pytest.mark.parametrize("space", [SpaceNorm.lp(1), SpaceNorm.lp(2), SpaceNorm.sup()], ids=["l1", "l2", "sup"])
def test_criterion_5_decay(w13, battery, space):
    ks = _decay_ks()
    assert ks == [4, 5]
    assert len(battery) == 20 and all(x.max_index() <= SUPPORT_BOUND for x in battery)
    times = recovery_times(build_construction(DEPTH), 5)
    for x in battery:
        base = norm(x, space)
        for k in ks:
            y = norm(forward_shift_power(w13, x, times[k]), space)
            if space.exact:
                assert isinstance(y, ScaledRational)
                assert y <= base.mul_pow2(-k)
            else:
                scaled = type(base)(base.mant, base.exp - k, base.rel_err)
                assert leq_rel(y, scaled, L2_REL_TOL)


# ---------------------------------------------------------------------------
# 6


@acceptance(6, "right inverse B_w^n S^n x = x bit-exact for n in {1, 4, 20, 210}")
@pytest.mark.parametrize("n", [1, 4, 20, 210])
def test_criterion_6_right_inverse(w13, battery, n):
    for x in battery:
        v = verify_right_inverse(w13, x, n)
        assert v.status is Status.HOLDS_EXACTLY, v.narrative


# ---------------------------------------------------------------------------
# 7


@acceptance(7, "hypermixing condition fails: window exponent <= -10 at s_9; brute force agrees at 2000")
def test_criterion_7_hypermixing(w13):
    v = check_hypermixing_condition(w13, S_VALUES[9])
    assert v.witness["window"]["exponent"] <= -10
    n, k = v.witness["window"]["n"], v.witness["window"]["k"]
    assert w13.partial_product(n, k).exponent == v.witness["window"]["exponent"]
    exps = expanded_weights(9)
    assert min_window(w13, BRUTE_HORIZON) == brute_min_window(exps, BRUTE_HORIZON)


# ---------------------------------------------------------------------------
# 8


def _ceil_log2(q: Fraction) -> int:
    j = 0
    while 2**j < q:
        j += 1
    return j


@acceptance(8, "covering times: tent within ceil(log2(2/L)) + 1, doubling exact, shift cylinder of length j+1 gives j")
def test_criterion_8a_tent():
    rng = random.Random(8)
    count = 0
    for e in range(1, 11):
        length = F(1, 2**e)
        for _ in range(5):
            lo = F(rng.randint(0, 2**e * 997 - 997), 2**e * 997)
            iv = Interval(lo, lo + length)
            v = covering_time(Tent(), iv)
            assert v.status is Status.HOLDS_EXACTLY
            j = v.witness["j"]
            assert image_power(Tent(), iv, j) == [Interval(0, 1)]
            assert j <= _ceil_log2(2 / length) + 1
            count += 1
    assert count == 50


@acceptance(8, "covering times: tent within ceil(log2(2/L)) + 1, doubling exact, shift cylinder of length j+1 gives j")
def test_criterion_8b_doubling():
    rng = random.Random(9)
    for _ in range(50):
        width = F(rng.randint(1, 1000), rng.randint(1000, 10**6))
        arc = Arc(F(rng.randrange(1000), 1000), width / 2)
        assert covering_time(Doubling(), arc).witness["j"] == _ceil_log2(1 / width)


@acceptance(8, "covering times: tent within ceil(log2(2/L)) + 1, doubling exact, shift cylinder of length j+1 gives j")
@pytest.mark.parametrize("j", [0, 1, 3, 7])
def test_criterion_8c_shift_cylinder(j):
    rng = random.Random(j)
    cyl = Cylinder(random_bits(rng, j + 1))
    assert covering_time(Shift(), cyl).witness["j"] == j


# ---------------------------------------------------------------------------
# 9-11


@acceptance(9, "rotation by 305/987: no two consecutive returns of B_{delta/4}(0) up to 900, and some return")
def test_criterion_9_no_consecutive_returns():
    rot = RotationSystem(THETA)
    v = no_consecutive_returns(rot, 0, RETURN_HORIZON)
    assert v.status is Status.HOLDS_UP_TO_HORIZON
    delta = circ(THETA, 0)
    radius = delta / 4
    assert v.witness["radius"] == radius
    hits = [n for n in range(RETURN_HORIZON + 1) if circ(n * THETA, 0) < 2 * radius]
    u = CircleBall(0, radius)
    assert return_set(rot, u, u, RETURN_HORIZON) == hits
    assert not any(b == a + 1 for a, b in zip(hits, hits[1:]))
    assert [n for n in hits if n >= 1]


@acceptance(10, "rotation: all 64 equispaced targets delta-covered (delta = 1/100) within 986 steps")
def test_criterion_10_cover():
    targets = [F(m, COVER_TARGETS) for m in range(COVER_TARGETS)]
    v = strong_transitivity_cover(RotationSystem(THETA), 0, COVER_DELTA, targets, COVER_HORIZON)
    assert v.status is Status.EVIDENCE_FOR
    times = dict((F(x), j) for x, j in v.witness["times"])
    assert len(times) == COVER_TARGETS
    for x in targets:
        j = times[x]
        assert j <= COVER_HORIZON and circ(x, j * THETA) < COVER_DELTA
        assert all(circ(x, m * THETA) >= COVER_DELTA for m in range(j))


@acceptance(11, "separation: T^n(U) and T^(n+1)(U) disjoint for n <= 900 (rotation, x = 0)")
def test_criterion_11_separation():
    rot = RotationSystem(THETA)
    u, v = separation_region(rot, 0, RETURN_HORIZON)
    assert v.status is Status.HOLDS_UP_TO_HORIZON
    current = u
    for n in range(RETURN_HORIZON + 1):
        nxt = image(rot, current)[0]
        assert nxt.center == (current.center + THETA) % 1 and nxt.radius == u.radius
        # open balls are disjoint iff their centers are at least the sum of radii apart
        assert circ(current.center, nxt.center) >= current.radius + nxt.radius
        current = nxt


# ---------------------------------------------------------------------------
# 12


@acceptance(12, "oracle equivalences: products, shift powers and images")
def test_criterion_12a_products(w13):
    exps = expanded_weights(9)
    assert len(exps) > PRODUCT_SPAN
    pp = w13.partial_product
    bad = 0
    for i in range(1, PRODUCT_SPAN):
        acc = 0
        for j in range(PRODUCT_SPAN - i + 1):
            if pp(i, j).exponent != acc:
                bad += 1
            acc += exps[i + j]
    assert bad == 0


@acceptance(12, "oracle equivalences: products, shift powers and images")
def test_criterion_12b_shift_powers(w13, battery):
    for x in battery:
        y = x
        for n in range(1, SHIFT_POWER_MAX + 1):
            y = forward_shift(w13, y)
            assert forward_shift_power(w13, x, n) == y


@acceptance(12, "oracle equivalences: products, shift powers and images")
@pytest.mark.parametrize("kind", ["tent", "doubling", "rotation", "shift"])
def test_criterion_12c_images(kind):
    rng = random.Random(f"images-{kind}")
    rot = RotationSystem(THETA)
    bad = []
    for _ in range(REGIONS_PER_SYSTEM):
        if kind == "tent":
            a, b = sorted(rng.sample(range(10**4 + 1), 2))
            region = Interval(F(a, 10**4), F(b, 10**4))
            bad += grid_discrepancies(kind, region, image(Tent(), region), GRID_POINTS)
        elif kind == "doubling":
            region = Arc(F(rng.randrange(10**4), 10**4), F(rng.randint(1, 5000), 10**4))
            bad += grid_discrepancies(kind, region, image(Doubling(), region), GRID_POINTS)
        elif kind == "rotation":
            region = CircleBall(F(rng.randrange(10**4), 10**4), F(rng.randint(1, 5000), 10**4))
            bad += grid_discrepancies(kind, region, image(rot, region), GRID_POINTS, THETA)
        else:
            region = Cylinder(random_bits(rng, rng.randint(0, 16)))
            bad += shift_discrepancies(region, image(Shift(), region), rng, GRID_POINTS)
    assert bad == []


# ---------------------------------------------------------------------------
# 13


@acceptance(13, "determinism: two runs of the full CLI suite give byte-identical reports")
def test_criterion_13_determinism(tmp_path):
    first = run_suite(tmp_path / "a", hash_seed="1")
    second = run_suite(tmp_path / "b", hash_seed="2024")
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], name


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
