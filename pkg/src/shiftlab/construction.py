"""The recursive block weight sequence and its verified identities.

Blocks ``b_1, b_2, ...`` are concatenated starting at index 0:

* ``b_1 = (1/2)``, ``b_2 = (2)``, ``b_3 = (1/2)``;
* even ``n >= 4``: ``s_{n-1}`` twos;
* odd ``n >= 5``: a 1/2, then ``s_{n-2} - 1`` repetitions of
  ``s_{n-1}`` ones followed by a 1/2,

where ``s_n = |b_2| + ... + |b_n|``.  Odd blocks are kept as a two-run
pattern with a repeat count, so depth 13 (length about 5e20) costs a few
dozen integers.
"""

from __future__ import annotations

import enum
import os
import random
from dataclasses import dataclass, field

from .errors import (
    DepthTooLarge,
    InsufficientDepth,
    RangeViolatesPrecondition,
    ScanBudgetExceeded,
)
from .scan import DEFAULT_BUDGET, window_min, window_min_pointwise
from .verdict import Status, Verdict
from .weights import RunLengthWeights, Segment

DEFAULT_DEPTH = 13
EXHAUSTIVE_LIMIT = 10**6
DEFAULT_SAMPLES = 10_000
DEFAULT_MEMORY_MB = 512


class BlockKind(str, enum.Enum):
    SEED = "seed"
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class BlockSpec:
    n: int
    kind: BlockKind
    length: int
    segments: tuple[Segment, ...]

    def counts(self) -> tuple[int, int, int]:
        """Number of (1/2, 1, 2) entries."""
        tally = {-1: 0, 0: 0, 1: 0}
        for seg in self.segments:
            for e, n in seg.pattern:
                tally[e] += n * seg.repeats
        return tally[-1], tally[0], tally[1]


@dataclass(frozen=True)
class RecoveryTimes:
    """``n_k = s_{2k+2}`` for ``1 <= k <= k_max``."""

    times: dict[int, int]

    def __getitem__(self, k: int) -> int:
        return self.times[k]

    def items(self):
        return sorted(self.times.items())


@dataclass(frozen=True)
class ConstructionState:
    depth: int
    blocks: tuple[BlockSpec, ...]
    s_table: dict[int, int]
    weights: RunLengthWeights = field(repr=False)

    def s(self, n: int) -> int:
        if n == 1:
            return 0
        if n not in self.s_table:
            raise InsufficientDepth(f"s_{n} needs depth {n}, construction has depth {self.depth}")
        return self.s_table[n]

    def block(self, n: int) -> BlockSpec:
        if not 1 <= n <= self.depth:
            raise InsufficientDepth(f"block {n} not materialized (depth {self.depth})")
        return self.blocks[n - 1]

    def block_start(self, n: int) -> int:
        """Index of the first weight of block ``n``."""
        return 0 if n == 1 else self.s(n - 1) + 1

    @property
    def total_length(self) -> int:
        return self.weights.total_length

    def to_json(self) -> dict:
        out = self.weights.to_json()
        out["depth"] = str(self.depth)
        out["s_table"] = {str(n): str(v) for n, v in sorted(self.s_table.items())}
        return out


def memory_budget_mb() -> int:
    raw = os.environ.get("SHIFTLAB_MAX_MEMORY_MB")
    if raw is None:
        return DEFAULT_MEMORY_MB
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"SHIFTLAB_MAX_MEMORY_MB must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError("SHIFTLAB_MAX_MEMORY_MB must be positive")
    return value


def build_construction(depth: int = DEFAULT_DEPTH, max_memory_mb: int | None = None) -> ConstructionState:
    """Materialize blocks ``b_1 ... b_depth``.

    Memory is dominated by the integers ``s_n``, whose bit length roughly
    doubles every two blocks; :class:`DepthTooLarge` is raised before the
    estimated size exceeds the budget.
    """
    if depth < 3:
        raise ValueError("depth must be at least 3")
    if max_memory_mb is None:
        max_memory_mb = memory_budget_mb()
    budget_bits = max_memory_mb * 8 * 2**20

    half, two = Segment(((-1, 1),), 1), Segment(((1, 1),), 1)
    blocks = [
        BlockSpec(1, BlockKind.SEED, 1, (half,)),
        BlockSpec(2, BlockKind.SEED, 1, (two,)),
        BlockSpec(3, BlockKind.SEED, 1, (half,)),
    ]
    s = {2: 1, 3: 2}
    used_bits = 0
    for n in range(4, depth + 1):
        # every stored integer is at most s_{n-1} * s_{n-2}; a block keeps a handful of them
        projected = s[n - 1].bit_length() + (s[n - 2].bit_length() if n % 2 else 0)
        used_bits += 8 * (projected + 64)
        if used_bits > budget_bits:
            raise DepthTooLarge(
                f"depth {depth} needs more than {max_memory_mb} MB (stopped at block {n})"
            )
        if n % 2 == 0:
            length = s[n - 1]
            segs = (Segment(((1, 1),), length),)
            blocks.append(BlockSpec(n, BlockKind.EVEN, length, segs))
        else:
            halves, gap = s[n - 2], s[n - 1]
            segs = (Segment(((-1, 1),), 1), Segment(((0, gap), (-1, 1)), halves - 1))
            length = halves + (halves - 1) * gap
            blocks.append(BlockSpec(n, BlockKind.ODD, length, segs))
        s[n] = s[n - 1] + length
    weights = RunLengthWeights([seg for b in blocks for seg in b.segments])
    return ConstructionState(depth, tuple(blocks), s, weights)


def recovery_times(state: ConstructionState, k_max: int) -> RecoveryTimes:
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    if state.depth < 2 * k_max + 2:
        raise InsufficientDepth(f"n_{k_max} = s_{2 * k_max + 2} needs depth {2 * k_max + 2}")
    return RecoveryTimes({k: state.s(2 * k + 2) for k in range(1, k_max + 1)})


def count_block_entries(state: ConstructionState, n: int) -> tuple[int, int, int]:
    """``(halves, ones, twos)`` in block ``n``."""
    return state.block(n).counts()


# ---------------------------------------------------------------------------
# identities and estimates


def verify_balance(state: ConstructionState, k: int) -> Verdict:
    """Check that the weights of blocks ``b_2 ... b_{2k+1}`` multiply to 1."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if state.depth < 2 * k + 1:
        raise InsufficientDepth(f"balance at k={k} needs depth {2 * k + 1}")
    n = state.s(2 * k + 1)
    e = state.weights.partial_product(1, n).exponent
    witness = {"n": n, "exponent": e}
    if e == 0:
        return Verdict(Status.HOLDS_EXACTLY, horizon=n, witness=witness,
                       narrative=f"M_1^{n} = 2^0 = 1")
    return Verdict(Status.FAILS_WITH_WITNESS, horizon=n, witness=witness,
                   narrative=f"M_1^{n} = 2^{e}, not 1")


def easy_window(state: ConstructionState, k: int) -> tuple[int, int]:
    """Default index window for the estimate ``M_i^{n_k} >= 1/2``.

    Indices past ``s_{2k+1}`` up to ``s_{2k+3}`` (the next even/odd pair of
    blocks), clipped to what is materialized.
    """
    n_k = recovery_times(state, k)[k]
    lo = state.s(2 * k + 1) + 1
    top = state.s(2 * k + 3) if 2 * k + 3 <= state.depth else state.s(state.depth)
    hi = min(top, state.total_length - n_k)
    if hi < lo:
        raise InsufficientDepth(f"no materialized index window for the easy estimate at k={k}")
    return lo, hi


def hard_window(state: ConstructionState, k: int) -> tuple[int, int]:
    """Index window ``[1, s_{2k+1}]`` of the estimate ``M_i^{n_k} >= 2^k``."""
    n_k = recovery_times(state, k)[k]
    hi = state.s(2 * k + 1)
    if hi + n_k > state.total_length:
        raise InsufficientDepth(f"hard estimate at k={k} needs depth {2 * k + 3}")
    return 1, hi


def _boundary_points(state: ConstructionState, n_k: int, lo: int, hi: int) -> set[int]:
    pts = {lo, hi}
    for a in state.weights.segment_starts:
        for c in (a - 1, a, a + 1, a - n_k, a - n_k + 1, a - n_k + 2):
            if lo <= c <= hi:
                pts.add(c)
    return pts


def stratified_sample(
    state: ConstructionState, n_k: int, lo: int, hi: int, samples: int, seed: int
) -> list[int]:
    """Seeded stratified sample of ``[lo, hi]`` plus all block-boundary indices."""
    rng = random.Random(seed)
    width = hi - lo + 1
    strata = min(samples, width)
    pts = _boundary_points(state, n_k, lo, hi)
    for s in range(strata):
        a = lo + width * s // strata
        b = lo + width * (s + 1) // strata - 1
        pts.add(rng.randint(a, b))
    return sorted(pts)


def _estimate(
    state: ConstructionState,
    k: int,
    window: tuple[int, int],
    bound: int,
    name: str,
    method: str,
    samples: int,
    seed: int,
) -> Verdict:
    n_k = recovery_times(state, k)[k]
    lo, hi = window
    seq = state.weights
    width = hi - lo + 1
    used, result = method, None
    if method == "auto":
        try:
            result = window_min(seq, n_k, lo, hi, DEFAULT_BUDGET)
            used = "scan"
        except ScanBudgetExceeded:
            used = "pointwise" if width <= EXHAUSTIVE_LIMIT else "sampled"
    if result is None:
        if used == "scan":
            result = window_min(seq, n_k, lo, hi, DEFAULT_BUDGET)
        elif used == "pointwise":
            if width > EXHAUSTIVE_LIMIT:
                raise ValueError(f"pointwise scan limited to {EXHAUSTIVE_LIMIT} indices")
            result = window_min_pointwise(seq, n_k, lo, hi)
        elif used == "sampled":
            pts = stratified_sample(state, n_k, lo, hi, samples, seed)
            best = min((seq.partial_product(i, n_k).exponent, i) for i in pts)
            result = (best[0], best[1], len(pts))
        else:
            raise ValueError(f"unknown method {method!r}")

    min_e, argmin, checked = result
    witness = {
        "min_exponent": min_e,
        "argmin": argmin,
        "indices_checked": checked,
        "window": [lo, hi],
        "n_k": n_k,
        "method": used,
    }
    if min_e < bound:
        return Verdict(Status.FAILS_WITH_WITNESS, horizon=hi, witness=witness,
                       narrative=f"{name}: M_{argmin}^{n_k} = 2^{min_e} < 2^{bound}")
    status = Status.EVIDENCE_FOR if used == "sampled" else Status.HOLDS_EXACTLY
    return Verdict(status, horizon=hi, witness=witness,
                   narrative=f"{name}: min exponent {min_e} >= {bound} over {checked} indices ({used})")


def verify_easy_estimate(
    state: ConstructionState,
    k: int,
    i_range: tuple[int, int] | None = None,
    method: str = "auto",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> Verdict:
    """Check ``M_i^{n_k} >= 1/2`` for ``i > s_{2k+1}`` over an inclusive window."""
    if k < 2:
        raise RangeViolatesPrecondition("the estimate is stated for k >= 2")
    n_k = recovery_times(state, k)[k]
    if i_range is None:
        i_range = easy_window(state, k)
    lo, hi = i_range
    if lo <= state.s(2 * k + 1) or hi < lo:
        raise RangeViolatesPrecondition(f"easy estimate needs i > s_{2 * k + 1} = {state.s(2 * k + 1)}")
    if hi + n_k > state.total_length:
        raise InsufficientDepth(f"index {hi} + n_{k} runs past the materialized weights")
    return _estimate(state, k, (lo, hi), -1, "easy estimate", method, samples, seed)


def verify_hard_estimate(
    state: ConstructionState,
    k: int,
    i_range: tuple[int, int] | None = None,
    method: str = "auto",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> Verdict:
    """Check ``M_i^{n_k} >= 2^k`` for ``1 <= i <= s_{2k+1}``."""
    if k < 2:
        raise RangeViolatesPrecondition("the estimate is stated for k >= 2")
    n_k = recovery_times(state, k)[k]
    if i_range is None:
        i_range = hard_window(state, k)
    lo, hi = i_range
    if lo < 1 or hi > state.s(2 * k + 1) or hi < lo:
        raise RangeViolatesPrecondition(f"hard estimate needs 1 <= i <= s_{2 * k + 1}")
    if hi + n_k > state.total_length:
        raise InsufficientDepth(f"hard estimate at k={k} needs depth {2 * k + 3}")
    return _estimate(state, k, (lo, hi), k, "hard estimate", method, samples, seed)
