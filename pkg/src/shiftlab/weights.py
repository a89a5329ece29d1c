"""Exact weight sequences and their partial products.

A dyadic weight sequence stores each weight as its base-2 exponent
(``w = 2**e``).  Weights are grouped into :class:`Segment` objects, each a
short pattern of runs repeated a (possibly astronomically large) number of
times, so the block construction stays ``O(depth)`` in memory even when
its length exceeds 10**20.

Indexing: the concatenated weights occupy indices ``0, 1, 2, ...`` and
``partial_product(i, j)`` is the product ``w[i] * ... * w[i + j - 1]``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import FormatError, IndexBeyondMaterialized
from .exact import ScaledRational, parse_rational
from .summary import Summary, concat
from .verdict import Status, Verdict

#: A dyadic weight ``2**e`` is stored as the signed integer ``e``.
DyadicExponent = int

_ULP = 2.0**-52


def weight_value(e: DyadicExponent) -> Fraction:
    return Fraction(2) ** e


# ---------------------------------------------------------------------------
# product values


@dataclass(frozen=True)
class ExactPow2:
    """The exact product ``2**exponent``."""

    exponent: int

    is_exact = True

    def log2(self) -> float:
        return float(self.exponent)

    def as_scaled(self) -> ScaledRational:
        return ScaledRational.pow2(self.exponent)

    def __mul__(self, other: "ExactPow2") -> "ExactPow2":
        return ExactPow2(self.exponent + other.exponent)


@dataclass(frozen=True)
class LogSpace:
    """A product known through its base-2 logarithm.

    ``rel_err_bound`` bounds the relative error of ``2**log2_value`` as an
    approximation of the true product.
    """

    log2_value: float
    rel_err_bound: float

    is_exact = False

    def log2(self) -> float:
        return self.log2_value

    @property
    def log2_err(self) -> float:
        """Absolute error bound on ``log2_value``."""
        return math.log2(1.0 + self.rel_err_bound)


ProductValue = ExactPow2 | LogSpace


# ---------------------------------------------------------------------------
# dyadic run-length sequences


class Segment:
    """``pattern`` (a tuple of ``(exponent, length)`` runs) repeated ``repeats`` times."""

    __slots__ = (
        "pattern",
        "repeats",
        "period",
        "period_exp",
        "offsets",
        "run_prefix",
        "exps",
        "uniform",
        "_summary",
    )

    def __init__(self, pattern: Sequence[tuple[int, int]], repeats: int = 1):
        pattern = tuple((int(e), int(n)) for e, n in pattern)
        if not pattern:
            raise ValueError("empty pattern")
        if any(n < 1 for _, n in pattern):
            raise ValueError("run lengths must be positive")
        if repeats < 1:
            raise ValueError("repeat count must be positive")
        if len({e for e, _ in pattern}) == 1:
            # a constant pattern is stored as period one
            e = pattern[0][0]
            repeats = repeats * sum(n for _, n in pattern)
            pattern = ((e, 1),)
        self.pattern = pattern
        self.repeats = repeats
        self.exps = [e for e, _ in pattern]
        self.offsets = []
        self.run_prefix = []
        pos = acc = 0
        for e, n in pattern:
            self.offsets.append(pos)
            self.run_prefix.append(acc)
            pos += n
            acc += e * n
        self.period = pos
        self.period_exp = acc
        self.uniform = len(pattern) == 1
        self._summary = None

    @property
    def length(self) -> int:
        return self.period * self.repeats

    @property
    def total_exp(self) -> int:
        return self.period_exp * self.repeats

    def period_summary(self) -> Summary:
        if self._summary is None:
            self._summary = concat(Summary.run(e, n) for e, n in self.pattern)
        return self._summary

    def prefix_within(self, r: int) -> int:
        """Exponent sum of the first ``r`` weights of this segment."""
        if self.uniform:
            return r * self.period_exp
        q, rem = divmod(r, self.period)
        acc = q * self.period_exp
        if rem:
            idx = bisect_right(self.offsets, rem) - 1
            acc += self.run_prefix[idx] + (rem - self.offsets[idx]) * self.exps[idx]
        return acc

    def exponent_at(self, r: int) -> int:
        if self.uniform:
            return self.exps[0]
        rem = r % self.period
        return self.exps[bisect_right(self.offsets, rem) - 1]

    def slice_summary(self, u: int, v: int) -> Summary:
        """Summary of local positions ``[u, v)``, ``0 <= u < v <= length``."""
        if self.uniform:
            return Summary.run(self.exps[0], v - u)
        p = self.period
        qu, ru = divmod(u, p)
        qv, rv = divmod(v, p)
        if qu == qv:
            return self._pattern_slice(ru, rv)
        parts = []
        if ru:
            parts.append(self._pattern_slice(ru, p))
            qu += 1
        if qv > qu:
            parts.append(self.period_summary().repeat(qv - qu))
        if rv:
            parts.append(self._pattern_slice(0, rv))
        return concat(parts)

    def _pattern_slice(self, a: int, b: int) -> Summary:
        parts = []
        for (e, n), off in zip(self.pattern, self.offsets):
            lo, hi = max(a, off), min(b, off + n)
            if lo < hi:
                parts.append(Summary.run(e, hi - lo))
        return concat(parts)

    def change_points(self, u: int, v: int) -> Iterator[int]:
        """Local positions in ``(0, ...)`` within ``[u, v)`` where the exponent changes."""
        if self.uniform or u >= v:
            return
        p = self.period
        starts = [
            off
            for r, off in enumerate(self.offsets)
            if self.exps[r] != self.exps[r - 1]  # r == 0 compares with the cyclic predecessor
        ]
        q = u // p
        while q * p < v:
            base = q * p
            for off in starts:
                pos = base + off
                if pos >= v:
                    return
                if pos >= u and pos > 0:
                    yield pos
            q += 1

    def change_point_count(self, u: int, v: int) -> int:
        """Upper bound on the number of points :meth:`change_points` yields."""
        if self.uniform or u >= v:
            return 0
        return ((v - 1) // self.period - u // self.period + 1) * len(self.pattern)

    def runs(self) -> Iterator[tuple[int, int]]:
        if self.uniform:
            yield self.exps[0], self.repeats
            return
        for _ in range(self.repeats):
            yield from self.pattern

    def __repr__(self) -> str:
        return f"Segment({self.pattern!r}, repeats={self.repeats})"


class RunLengthWeights:
    """A finite dyadic weight sequence stored as repeated run patterns.

    Parameters
    ----------
    segments : sequence of Segment
        Concatenated in order; index 0 is the first weight of the first
        segment.
    """

    exact = True

    def __init__(self, segments: Sequence[Segment]):
        self.segments = tuple(segments)
        if not self.segments:
            raise ValueError("a weight sequence needs at least one segment")
        starts, prefix = [], []
        pos = acc = 0
        for seg in self.segments:
            starts.append(pos)
            prefix.append(acc)
            pos += seg.length
            acc += seg.total_exp
        self._starts = starts
        self._seg_prefix = prefix
        self.total_length = pos
        self.total_exponent = acc

    @classmethod
    def from_runs(cls, runs: Sequence[tuple[int, int]]) -> "RunLengthWeights":
        """One segment per run; adjacent runs with equal exponents are kept apart."""
        return cls([Segment(((e, 1),), n) for e, n in runs])

    @classmethod
    def constant(cls, e: int, length: int) -> "RunLengthWeights":
        return cls.from_runs([(e, length)])

    # -- run-level views -------------------------------------------------

    @property
    def runs(self) -> Iterator[tuple[int, int]]:
        """Flattened ``(exponent, length)`` runs.  May be astronomically long."""
        for seg in self.segments:
            yield from seg.runs()

    def run_count(self) -> int:
        return sum(1 if s.uniform else s.repeats * len(s.pattern) for s in self.segments)

    @property
    def prefix_counts(self) -> list[int]:
        """Cumulative segment lengths (strictly increasing)."""
        return self._starts[1:] + [self.total_length]

    @property
    def prefix_exponents(self) -> list[int]:
        """Cumulative exponent sums at the end of each segment."""
        return self._seg_prefix[1:] + [self.total_exponent]

    @property
    def segment_starts(self) -> list[int]:
        return list(self._starts)

    def segment_index(self, t: int) -> int:
        """Index of the segment holding position ``t`` (``0 <= t < total_length``)."""
        return bisect_right(self._starts, t) - 1

    # -- point queries ---------------------------------------------------

    def prefix_exponent(self, t: int) -> int:
        """Exponent sum of ``w[0], ..., w[t - 1]``."""
        if t >= self.total_length:
            if t == self.total_length:
                return self.total_exponent
            raise IndexBeyondMaterialized(f"prefix {t} beyond length {self.total_length}")
        if t < 0:
            raise IndexError("negative position")
        k = bisect_right(self._starts, t) - 1
        return self._seg_prefix[k] + self.segments[k].prefix_within(t - self._starts[k])

    def weight_at(self, n: int) -> DyadicExponent:
        if not 0 <= n < self.total_length:
            raise IndexBeyondMaterialized(
                f"index {n} outside materialized length {self.total_length}"
            )
        k = bisect_right(self._starts, n) - 1
        return self.segments[k].exponent_at(n - self._starts[k])

    def partial_product(self, i: int, j: int) -> ExactPow2:
        """``M_i^j = w[i] * ... * w[i + j - 1]`` as an exact power of two."""
        if i < 1 or j < 0:
            raise ValueError("need i >= 1 and j >= 0")
        if j == 0:
            return ExactPow2(0)
        t = i + j
        if t >= self.total_length:
            if t > self.total_length:
                raise IndexBeyondMaterialized(
                    f"product up to index {t - 1} beyond length {self.total_length}"
                )
            hi = self.total_exponent
        else:
            k = bisect_right(self._starts, t) - 1
            hi = self._seg_prefix[k] + self.segments[k].prefix_within(t - self._starts[k])
        k = bisect_right(self._starts, i) - 1
        lo = self._seg_prefix[k] + self.segments[k].prefix_within(i - self._starts[k])
        return ExactPow2(hi - lo)

    def min_exponent(self) -> int:
        return min(min(s.exps) for s in self.segments)

    def max_exponent(self) -> int:
        return max(max(s.exps) for s in self.segments)

    # -- range summaries -------------------------------------------------

    def pieces(self, lo: int, hi: int) -> Iterator[tuple[int, int, Summary]]:
        """``(start, end, summary)`` for each segment intersected with ``[lo, hi)``."""
        if not 0 <= lo < hi <= self.total_length:
            raise IndexBeyondMaterialized(f"range [{lo}, {hi}) outside the sequence")
        k = bisect_right(self._starts, lo) - 1
        while k < len(self.segments) and self._starts[k] < hi:
            a = self._starts[k]
            seg = self.segments[k]
            u, v = max(lo, a), min(hi, a + seg.length)
            yield u, v, seg.slice_summary(u - a, v - a)
            k += 1

    def summarize(self, lo: int, hi: int) -> Summary:
        """Summary of exponents at indices ``[lo, hi)``; positions relative to ``lo``."""
        return concat(s for _, _, s in self.pieces(lo, hi))

    def to_json(self, max_runs: int = 100_000) -> dict:
        """Serialize in the ``dyadic_runs`` file format.

        Plain ``runs`` are written when the flattened run count is at most
        ``max_runs``; otherwise the compressed ``segments`` form is used.
        """
        if self.run_count() <= max_runs:
            return {"kind": "dyadic_runs", "runs": [[e, str(n)] for e, n in self.runs]}
        return {
            "kind": "dyadic_runs",
            "segments": [
                {"pattern": [[e, str(n)] for e, n in s.pattern], "repeat": str(s.repeats)}
                for s in self.segments
            ],
        }

    def __repr__(self) -> str:
        return f"RunLengthWeights(segments={len(self.segments)}, length={self.total_length})"


# ---------------------------------------------------------------------------
# general positive rational weights


class GeneralWeights:
    """Arbitrary positive rational weights, handled in log space.

    ``declared_horizon`` is the largest valid index; it defaults to the
    last value supplied.
    """

    exact = False

    def __init__(self, values: Sequence, declared_horizon: int | None = None):
        vals = tuple(parse_rational(v) for v in values)
        if not vals:
            raise ValueError("no weights given")
        if any(v <= 0 for v in vals):
            raise ValueError("weights must be strictly positive")
        if declared_horizon is None:
            declared_horizon = len(vals) - 1
        if not 0 <= declared_horizon < len(vals):
            raise ValueError("declared horizon must index a supplied value")
        self.values = vals[: declared_horizon + 1]
        self.declared_horizon = declared_horizon
        self.total_length = declared_horizon + 1
        self._logs = [_log2_fraction(v) for v in self.values]
        self._log_errs = [_log2_error(v) for v in self.values]
        prefix = [0.0]
        for x in self._logs:
            prefix.append(prefix[-1] + x)
        self._prefix = prefix

    def weight_at(self, n: int) -> Fraction:
        if not 0 <= n < self.total_length:
            raise IndexBeyondMaterialized(f"index {n} beyond declared horizon")
        return self.values[n]

    def log2_at(self, n: int) -> float:
        return self._logs[n]

    def prefix_exponent(self, t: int) -> float:
        if not 0 <= t <= self.total_length:
            raise IndexBeyondMaterialized(f"prefix {t} beyond declared horizon")
        return self._prefix[t]

    def partial_product(self, i: int, j: int) -> LogSpace:
        return partial_product_general(self, i, j)

    def pieces(self, lo: int, hi: int) -> Iterator[tuple[int, int, Summary]]:
        if not 0 <= lo < hi <= self.total_length:
            raise IndexBeyondMaterialized(f"range [{lo}, {hi}) outside the sequence")
        for n in range(lo, hi):
            yield n, n + 1, Summary.run(self._logs[n], 1)

    def summarize(self, lo: int, hi: int) -> Summary:
        return concat(s for _, _, s in self.pieces(lo, hi))

    @property
    def segment_starts(self) -> list[int]:
        return list(range(self.total_length))

    def to_json(self) -> dict:
        return {
            "kind": "general",
            "values": [str(v) for v in self.values],
            "horizon": str(self.declared_horizon),
        }

    def __repr__(self) -> str:
        return f"GeneralWeights(horizon={self.declared_horizon})"


def _log2_fraction(q: Fraction) -> float:
    return math.log2(q.numerator) - math.log2(q.denominator)


def _log2_error(q: Fraction) -> float:
    """Absolute error bound for :func:`_log2_fraction`."""
    a = abs(math.log2(q.numerator))
    b = abs(math.log2(q.denominator))
    return (a + b + abs(a - b)) * _ULP


def partial_product_general(seq: GeneralWeights, i: int, j: int) -> LogSpace:
    """``M_i^j`` for general weights, summed in log space with an error bound."""
    if i < 1 or j < 0:
        raise ValueError("need i >= 1 and j >= 0")
    if j == 0:
        return LogSpace(0.0, 0.0)
    if i + j > seq.total_length:
        raise IndexBeyondMaterialized(f"product up to index {i + j - 1} beyond declared horizon")
    terms = seq._logs[i : i + j]
    value = math.fsum(terms)
    err = math.fsum(seq._log_errs[i : i + j]) + abs(value) * _ULP / 2
    return LogSpace(value, math.expm1(err * math.log(2)))


# ---------------------------------------------------------------------------
# surjectivity


def is_surjective_shift(seq) -> Verdict:
    """Whether ``sup 1 / w_n`` is finite over the materialized weights.

    For dyadic sequences the bound is exact.  For general weights only the
    scanned horizon is known; if the infimum keeps dropping late in the
    horizon the verdict is ``EvidenceAgainst``.
    """
    if isinstance(seq, RunLengthWeights):
        e = seq.min_exponent()
        bound = weight_value(-e)
        return Verdict(
            Status.HOLDS_WITH_BOUND,
            horizon=seq.total_length - 1,
            witness={"sup_inverse_weight": bound, "min_exponent": e},
            narrative=f"every weight is at least 2^{e}, so sup 1/w_n = {bound}",
        )
    values = seq.values
    h = len(values)
    inf_idx = min(range(h), key=lambda n: (values[n], n))
    inf_val = values[inf_idx]
    early = min(values[: max(1, h // 2)])
    witness = {"min_value": inf_val, "argmin": inf_idx, "sup_inverse_weight": 1 / inf_val}
    if inf_idx >= (3 * h) // 4 and inf_val < early:
        return Verdict(
            Status.EVIDENCE_AGAINST,
            horizon=seq.declared_horizon,
            witness=witness,
            narrative="the weights keep reaching new lows at the end of the horizon",
            flags=("finite-horizon",),
        )
    return Verdict(
        Status.HOLDS_WITH_BOUND,
        horizon=seq.declared_horizon,
        witness=witness,
        narrative=f"inf of the weights over the horizon is {inf_val}",
        flags=("finite-horizon",),
    )


# ---------------------------------------------------------------------------
# file format


def _nat(text, what: str) -> int:
    try:
        n = int(text)
    except (TypeError, ValueError):
        raise FormatError(f"{what} must be a natural number, got {text!r}") from None
    if isinstance(text, bool) or n < 0:
        raise FormatError(f"{what} must be a natural number, got {text!r}")
    return n


def _run_list(raw, what: str) -> list[tuple[int, int]]:
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"{what} must be a nonempty list of [exponent, length] pairs")
    out = []
    for item in raw:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise FormatError(f"bad run {item!r} in {what}")
        e, n = item
        try:
            e = int(e)
        except (TypeError, ValueError):
            raise FormatError(f"bad exponent {e!r}") from None
        n = _nat(n, "run length")
        if n < 1:
            raise FormatError("run lengths must be at least 1")
        out.append((e, n))
    return out


def weights_from_json(obj) -> RunLengthWeights | GeneralWeights:
    """Parse the weight-sequence file format."""
    if not isinstance(obj, dict):
        raise FormatError("a weight file holds a JSON object")
    kind = obj.get("kind")
    if kind == "dyadic_runs":
        if "segments" in obj:
            segs = []
            for raw in obj["segments"]:
                if not isinstance(raw, dict):
                    raise FormatError("each segment is an object")
                pattern = _run_list(raw.get("pattern"), "pattern")
                count = _nat(raw.get("repeat", 1), "repeat")
                if count < 1:
                    raise FormatError("repeat must be at least 1")
                segs.append(Segment(pattern, count))
            if not segs:
                raise FormatError("no segments")
            return RunLengthWeights(segs)
        return RunLengthWeights.from_runs(_run_list(obj.get("runs"), "runs"))
    if kind == "general":
        raw = obj.get("values")
        if not isinstance(raw, list) or not raw:
            raise FormatError("general weights need a nonempty 'values' list")
        try:
            vals = [parse_rational(v) for v in raw]
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad rational: {exc}") from None
        horizon = obj.get("horizon")
        try:
            return GeneralWeights(vals, None if horizon is None else _nat(horizon, "horizon"))
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    raise FormatError(f"unknown weight file kind {kind!r}")
