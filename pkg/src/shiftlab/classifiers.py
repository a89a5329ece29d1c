"""Finite-horizon probes of the weight criteria for ``B_w``.

Each criterion is asymptotic (``sup M_1^n = inf``, ``M_1^n -> inf``,
``inf M_n^k > 0``), so nothing here decides it.  The functions compute
exact finite-horizon quantities and turn them into evidence with the
heuristic thresholds documented on each function.

Exponents are exact integers for dyadic weights and float log2 values for
general weights.  All scans work segment by segment through
:class:`~shiftlab.summary.Summary`, never index by index, except for
general weights where every index is its own segment.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import InsufficientDepth, ZeroVector
from .exact import ScaledRational, leq_rel
from .shifts import SpaceNorm, SparseVector, forward_shift_power, norm, value_text
from .verdict import Status, Verdict
from .weights import RunLengthWeights, is_surjective_shift

#: Minimal number of doublings of the running record for EvidenceFor.
MIN_SCALES = 3
#: Stored witnesses per list; the total count is always reported.
MAX_WITNESSES = 64

DYADIC_TOL = ScaledRational.pow2(-20)
FLOAT_TOL = 1e-6


def _check_horizon(seq, horizon: int, offset: int = 0) -> None:
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if horizon + offset >= seq.total_length:
        raise InsufficientDepth(
            f"horizon {horizon} needs weight index {horizon + offset}, "
            f"only {seq.total_length} materialized"
        )


def _log_of_factor(seq, factor) -> float | int:
    """Exponent step for a multiplicative factor (2 -> 1)."""
    f = Fraction(factor)
    if f <= 1:
        raise ValueError("growth factor must exceed 1")
    if isinstance(seq, RunLengthWeights):
        e = f.numerator.bit_length() - 1
        if f == 2**e:
            return e
    return math.log2(f.numerator) - math.log2(f.denominator)


def _m_exp(seq, i: int, n: int):
    """Exponent (log2) of ``M_i^n``."""
    return seq.prefix_exponent(i + n) - seq.prefix_exponent(i)


def _running_max(seq, i: int, n: int):
    """``max(exp M_i^m for 1 <= m <= n)`` with its smallest argmax."""
    v, end = seq.summarize(i, i + n).pre_max
    return v, end


def _piece_extrema(seq, i: int, horizon: int, which: str):
    """``(n, exponent of M_i^n)`` at each segment's prefix extreme.

    ``which`` is ``"pre_max"`` or ``"pre_min"``; ``n`` runs over
    ``[1, horizon]``.
    """
    base = seq.prefix_exponent(i)
    for u, v, summ in seq.pieces(i, i + horizon):
        val, end = getattr(summ, which)
        yield u - i + end, seq.prefix_exponent(u) - base + val


def _scale(n: int) -> int:
    return n.bit_length()


def _checkpoints(horizon: int) -> list[int]:
    out = []
    n = 1
    while n < horizon:
        out.append(n)
        n <<= 1
    out.append(horizon)
    return out


# ---------------------------------------------------------------------------
# transitivity


def check_transitive(seq, horizon: int, growth=2, min_scales: int = MIN_SCALES) -> Verdict:
    """Finite evidence for ``sup_{n >= 1} M_1^n = inf``.

    The running maximum ``R(n) = max_{m <= n} M_1^m`` is read at the dyadic
    checkpoints ``1, 2, 4, ..., horizon``.  Walking the checkpoints, a
    growth event is counted whenever ``R`` has grown by the factor
    ``growth`` since the previous event.  Reaching ``min_scales`` events
    gives EvidenceFor; no event at all (``R`` bounded by ``growth`` times
    its first value) gives EvidenceAgainst; anything in between is
    Inconclusive.  The thresholds are heuristic.
    """
    _check_horizon(seq, horizon, offset=0)
    step = _log_of_factor(seq, growth)
    table = []
    for c in _checkpoints(horizon):
        r, arg = _running_max(seq, 1, c)
        table.append({"n": c, "running_max_exponent": r, "argmax": arg,
                      "exponent": _m_exp(seq, 1, c)})
    anchor = table[0]["running_max_exponent"]
    events = []
    for row in table[1:]:
        if row["running_max_exponent"] >= anchor + step:
            anchor = row["running_max_exponent"]
            events.append(row["argmax"])
    records = _records(_piece_extrema(seq, 1, horizon, "pre_max"), larger=True)
    witness = {
        "max_exponent": table[-1]["running_max_exponent"],
        "argmax": table[-1]["argmax"],
        "growth_events": events,
        "records": records[:MAX_WITNESSES],
        "record_count": len(records),
        "checkpoints": table,
    }
    if len(events) >= min_scales:
        status, msg = Status.EVIDENCE_FOR, f"running max of M_1^n grew {len(events)} times by x{growth}"
    elif not events:
        status, msg = Status.EVIDENCE_AGAINST, "running max of M_1^n never grew past its first value"
    else:
        status, msg = Status.INCONCLUSIVE, f"only {len(events)} growth events up to the horizon"
    return Verdict(status, horizon=horizon, witness=witness, narrative=msg, flags=("finite-horizon",))


def _records(pairs, larger: bool) -> list[dict]:
    out = []
    best = None
    for n, val in pairs:
        if best is None or (val > best if larger else val < best):
            best = val
            out.append({"n": n, "exponent": val})
    return out


# ---------------------------------------------------------------------------
# mixing


def last_at_most(seq, i: int, horizon: int, bound):
    """Largest ``n`` in ``[1, horizon]`` with ``exp M_i^n <= bound``, or None.

    Binary search on the suffix minimum ``min_{m >= n} exp M_i^m``, which is
    nondecreasing in ``n``; each probe is one range summary.
    """
    base = seq.prefix_exponent(i)

    def tail_min(n: int):
        lo = i + n - 1
        v, _ = seq.summarize(lo, i + horizon).pre_min
        return seq.prefix_exponent(lo) - base + v

    if tail_min(1) > bound:
        return None
    lo, hi = 1, horizon
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if tail_min(mid) <= bound:
            lo = mid
        else:
            hi = mid - 1
    return lo


def check_mixing(seq, horizon: int, bound_exp=0) -> Verdict:
    """Finite evidence for ``M_1^n -> inf``.

    With ``C = 2**bound_exp`` the witnesses are the per-segment minima of
    ``M_1^n`` that do not exceed ``C``, together with the last ``n`` up to
    the horizon where ``M_1^n <= C``.  Witnesses at ``MIN_SCALES`` distinct
    dyadic scales, or a last return in the second half of the horizon, give
    EvidenceAgainst.  EvidenceFor needs ``M_1^n >= 8C`` on the whole second
    half.  Otherwise Inconclusive.
    """
    _check_horizon(seq, horizon, offset=0)
    wit = [
        {"n": n, "exponent": e}
        for n, e in _piece_extrema(seq, 1, horizon, "pre_min")
        if e <= bound_exp
    ]
    last = last_at_most(seq, 1, horizon, bound_exp)
    half = (horizon + 1) // 2
    tail = seq.summarize(half, horizon + 1).pre_min[0] + seq.prefix_exponent(half) - seq.prefix_exponent(1)
    scales = sorted({_scale(w["n"]) for w in wit})
    witness = {
        "bound_exponent": bound_exp,
        "witnesses": wit[:MAX_WITNESSES],
        "witness_count": len(wit),
        "last_at_most_bound": last,
        "tail_min_exponent": tail,
    }
    if len(scales) >= MIN_SCALES or (last is not None and last >= half):
        status = Status.EVIDENCE_AGAINST
        msg = f"M_1^n <= 2^{bound_exp} recurs (last at n={last})"
    elif tail >= bound_exp + 3:
        status = Status.EVIDENCE_FOR
        msg = f"M_1^n >= 2^{bound_exp + 3} on the second half of the horizon"
    else:
        status = Status.INCONCLUSIVE
        msg = "no clear trend of M_1^n up to the horizon"
    return Verdict(status, horizon=horizon, witness=witness, narrative=msg, flags=("finite-horizon",))


# ---------------------------------------------------------------------------
# hypermixing characterization


def min_window(seq, horizon: int) -> tuple[object, int, int]:
    """``(exponent, n, k)`` minimizing ``M_n^k`` over ``n >= 1, k >= 1, n + k - 1 <= horizon``.

    Ties go to the smallest ``n``, then the smallest ``k``.
    """
    _check_horizon(seq, horizon, offset=0)
    v, start, end = seq.summarize(1, horizon + 1).sub_min
    return v, 1 + start, end - start


def min_window_brute(seq, horizon: int) -> tuple[object, int, int]:
    """Double-loop reference for :func:`min_window`."""
    _check_horizon(seq, horizon, offset=0)
    best = None
    for n in range(1, horizon + 1):
        for k in range(1, horizon - n + 2):
            cand = (_m_exp(seq, n, k), n, k)
            if best is None or cand < best:
                best = cand
    return best


def check_hypermixing_condition(seq, horizon: int) -> Verdict:
    """Finite evidence for ``sup M_1^n = inf`` and ``inf_{n,k} M_n^k > 0``.

    The infimum over all windows inside the horizon is exact.  Its record
    lows are tracked segment by segment; ``MIN_SCALES`` lows that each
    halve the previous one give EvidenceAgainst, as does transitivity
    evidence against.  EvidenceFor needs transitivity EvidenceFor and no
    new low in the second half of the horizon.
    """
    val, n, k = min_window(seq, horizon)
    records = []
    acc = None
    for u, v, summ in seq.pieces(1, horizon + 1):
        acc = summ if acc is None else acc + summ
        cur, s, e = acc.sub_min
        if not records or cur < records[-1]["exponent"]:
            records.append({"exponent": cur, "n": 1 + s, "k": e - s, "seen_up_to": v - 1})
    halvings = 0
    anchor = records[0]["exponent"]
    for r in records[1:]:
        if r["exponent"] <= anchor - 1:
            halvings += 1
            anchor = r["exponent"]
    trans = check_transitive(seq, horizon)
    witness = {
        "window": {"n": n, "k": k, "exponent": val},
        "records": records[:MAX_WITNESSES],
        "record_count": len(records),
        "halvings": halvings,
        "transitive": trans.status.value,
    }
    last_low = records[-1]["n"] + records[-1]["k"] - 1
    if halvings >= MIN_SCALES:
        status, msg = Status.EVIDENCE_AGAINST, f"inf of M_n^k keeps halving (now 2^{val})"
    elif trans.status is Status.EVIDENCE_AGAINST:
        status, msg = Status.EVIDENCE_AGAINST, "sup of M_1^n shows no growth"
    elif trans.status is Status.EVIDENCE_FOR and last_low <= horizon // 2:
        status, msg = Status.EVIDENCE_FOR, f"inf of M_n^k settled at 2^{val} and M_1^n grows"
    else:
        status, msg = Status.INCONCLUSIVE, "no clear trend up to the horizon"
    return Verdict(status, horizon=horizon, witness=witness, narrative=msg, flags=("finite-horizon",))


# ---------------------------------------------------------------------------
# strong transitivity


def _strictly_less(a, b) -> bool:
    return not leq_rel(b, a)


def strong_transitivity_evidence(seq, x: SparseVector, horizon: int, tol=None,
                                 space: SpaceNorm | None = None) -> Verdict:
    """Search ``n <= horizon`` for times where ``||S^n x||`` keeps dropping below ``tol``.

    Candidate times are where some ``M_{i+1}^n`` (``i`` in the support)
    reaches a new segment-level maximum, plus the horizon.  The reported times are the strict record lows of
    ``||S^n x||`` over the candidates; EvidenceFor when the last one is at
    most ``tol``.
    """
    if x.is_zero():
        raise ZeroVector("strong transitivity evidence needs a nonzero vector")
    _check_horizon(seq, horizon, offset=x.max_index())
    space = space or SpaceNorm.lp(1)
    dyadic = isinstance(seq, RunLengthWeights)
    if tol is None:
        tol = DYADIC_TOL if dyadic else FLOAT_TOL
    if not dyadic:
        x = x.to_float()
    surj = is_surjective_shift(seq)
    if surj.status is Status.EVIDENCE_AGAINST:
        return Verdict(Status.INCONCLUSIVE, horizon=horizon, witness={"surjective": surj.status.value},
                       narrative="B_w does not look surjective", flags=("finite-horizon",))
    cands = {horizon}
    for i in x.support:
        cands.update(r["n"] for r in _records(_piece_extrema(seq, i + 1, horizon, "pre_max"), larger=True))
    times, values = [], []
    for n in sorted(cands):
        val = norm(forward_shift_power(seq, x, n), space)
        if not values or _strictly_less(val, values[-1]):
            times.append(n)
            values.append(val)
    witness = {
        "times": times[-MAX_WITNESSES:],
        "norms": values[-MAX_WITNESSES:],
        "record_count": len(times),
        "norm": space.name,
        "tol": tol,
    }
    if leq_rel(values[-1], tol):
        return Verdict(Status.EVIDENCE_FOR, horizon=horizon, witness=witness,
                       narrative=f"||S^n x|| drops to {value_text(values[-1])} at n={times[-1]}",
                       flags=("finite-horizon",))
    return Verdict(Status.INCONCLUSIVE, horizon=horizon, witness=witness,
                   narrative="||S^n x|| stays above the tolerance", flags=("finite-horizon",))


__all__ = [
    "check_hypermixing_condition",
    "check_mixing",
    "check_transitive",
    "last_at_most",
    "min_window",
    "min_window_brute",
    "strong_transitivity_evidence",
]
