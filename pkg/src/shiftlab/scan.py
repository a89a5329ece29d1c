"""Run-compressed scans over dyadic weight sequences.

:func:`window_min` finds the exact minimum of ``exponent(M_i^n)`` over
every ``i`` in an index window without visiting each index.  As ``i``
advances by one the exponent changes by ``e[i + n] - e[i]``, which is
constant until ``i`` or ``i + n`` crosses a run boundary, so the minimum
is attained at a window endpoint or at such a crossing.  Inside a stretch
where ``i`` stays in one repeated segment and ``i + n`` in another, the
function shifts by a constant drift every ``lcm`` of the two periods, so
one period of the stretch decides it.

:func:`window_min_pointwise` is the per-index loop used as an oracle.
"""

from __future__ import annotations

import math

from .errors import IndexBeyondMaterialized, ScanBudgetExceeded
from .weights import RunLengthWeights

DEFAULT_BUDGET = 2_000_000


def _check_window(seq: RunLengthWeights, n: int, lo: int, hi: int) -> None:
    if n < 0 or lo < 0 or hi < lo:
        raise ValueError(f"bad window: n={n}, [{lo}, {hi}]")
    if hi + n > seq.total_length:
        raise IndexBeyondMaterialized(
            f"window end {hi} plus length {n} exceeds materialized length {seq.total_length}"
        )


def window_min(
    seq: RunLengthWeights, n: int, lo: int, hi: int, budget: int = DEFAULT_BUDGET
) -> tuple[int, int, int]:
    """Exact ``min(exponent(M_i^n) for lo <= i <= hi)``.

    Returns ``(min_exponent, argmin, indices_covered)``; the argmin is the
    smallest index attaining the minimum.  Raises
    :class:`ScanBudgetExceeded` when more than ``budget`` candidate points
    would be evaluated.
    """
    _check_window(seq, n, lo, hi)
    starts = seq._starts
    segs = seq.segments
    prefix = seq.prefix_exponent

    cuts = {lo, hi + 1}
    for a in starts:
        if lo < a <= hi:
            cuts.add(a)
        if lo < a - n <= hi:
            cuts.add(a - n)
    cuts = sorted(cuts)

    best = None
    spent = 0
    for a, b in zip(cuts, cuts[1:]):
        k1 = seq.segment_index(a)
        k2 = seq.segment_index(a + n) if a + n < seq.total_length else len(segs) - 1
        s1, s2 = segs[k1], segs[k2]
        a1, a2 = starts[k1], starts[k2]
        p1 = 1 if s1.uniform else s1.period
        p2 = 1 if s2.uniform else s2.period
        e1 = s1.period_exp if not s1.uniform else s1.exps[0]
        e2 = s2.period_exp if not s2.uniform else s2.exps[0]
        g = p1 * p2 // math.gcd(p1, p2)
        x, y = a, b
        if b - a > g:
            drift = (g // p2) * e2 - (g // p1) * e1
            if drift >= 0:
                y = a + g
            else:
                x = b - g
        cost = 2 + s1.change_point_count(x - a1, y - a1)
        if n:
            cost += s2.change_point_count(x + n - a2, y + n - a2)
        spent += cost
        if spent > budget:
            raise ScanBudgetExceeded(f"more than {budget} candidate points needed")
        cands = {x, y - 1}
        cands.update(a1 + c for c in s1.change_points(x - a1, y - a1))
        if n:
            cands.update(a2 + c - n for c in s2.change_points(x + n - a2, y + n - a2))
        for t in cands:
            val = prefix(t + n) - prefix(t)
            if best is None or (val, t) < best:
                best = (val, t)
    return best[0], best[1], hi - lo + 1


def window_min_pointwise(seq: RunLengthWeights, n: int, lo: int, hi: int) -> tuple[int, int, int]:
    """Per-index reference for :func:`window_min`."""
    _check_window(seq, n, lo, hi)
    prefix = seq.prefix_exponent
    best_val, best_i = None, None
    for i in range(lo, hi + 1):
        val = prefix(i + n) - prefix(i)
        if best_val is None or val < best_val:
            best_val, best_i = val, i
    return best_val, best_i, hi - lo + 1
