"""Associative summaries of exponent sequences.

A :class:`Summary` records, for a nonempty sequence of exponents, its
length, total, extreme nonempty prefix sums, minimal nonempty suffix sum
and minimal nonempty contiguous sum, each with its position.  Two
summaries combine associatively, so a pattern repeated ``c`` times is
summarized in ``O(log c)`` combinations by repeated squaring.

Ties are broken towards the lexicographically smallest position, which
keeps results identical to a left-to-right brute-force scan.
"""

from __future__ import annotations


class Summary:
    __slots__ = ("length", "total", "pre_min", "pre_max", "suf_min", "sub_min")

    def __init__(self, length, total, pre_min, pre_max, suf_min, sub_min):
        self.length = length
        self.total = total
        self.pre_min = pre_min  # (value, end)
        self.pre_max = pre_max  # (value, end)
        self.suf_min = suf_min  # (value, start)
        self.sub_min = sub_min  # (value, start, end)

    @classmethod
    def run(cls, e, length: int) -> "Summary":
        """Summary of ``length`` copies of exponent ``e``."""
        if length < 1:
            raise ValueError("a run has positive length")
        t = e * length
        if e < 0:
            return cls(length, t, (t, length), (e, 1), (t, 0), (t, 0, length))
        if e > 0:
            return cls(length, t, (e, 1), (t, length), (e, length - 1), (e, 0, 1))
        return cls(length, t, (e, 1), (e, 1), (e, 0), (e, 0, 1))

    def __add__(self, other: "Summary") -> "Summary":
        n = self.length
        t = self.total
        b_pre_min = other.pre_min
        cand = (t + b_pre_min[0], n + b_pre_min[1])
        pre_min = self.pre_min if self.pre_min[0] <= cand[0] else cand

        cand = (t + other.pre_max[0], n + other.pre_max[1])
        pre_max = self.pre_max if self.pre_max[0] >= cand[0] else cand

        a_suf = self.suf_min
        cand_ab = (other.total + a_suf[0], a_suf[1])
        b_suf = other.suf_min
        suf_min = cand_ab if cand_ab[0] <= b_suf[0] else (b_suf[0], n + b_suf[1])

        b_sub = other.sub_min
        sub_min = min(
            self.sub_min,
            (a_suf[0] + b_pre_min[0], a_suf[1], n + b_pre_min[1]),
            (b_sub[0], n + b_sub[1], n + b_sub[2]),
        )
        return Summary(n + other.length, t + other.total, pre_min, pre_max, suf_min, sub_min)

    def repeat(self, count: int) -> "Summary":
        """Summary of this sequence concatenated ``count >= 1`` times."""
        if count < 1:
            raise ValueError("repeat count must be positive")
        result = None
        base = self
        while True:
            if count & 1:
                result = base if result is None else result + base
            count >>= 1
            if not count:
                return result
            base = base + base

    def __repr__(self) -> str:
        return (
            f"Summary(length={self.length}, total={self.total}, pre_min={self.pre_min}, "
            f"pre_max={self.pre_max}, suf_min={self.suf_min}, sub_min={self.sub_min})"
        )


def concat(parts) -> Summary | None:
    result = None
    for part in parts:
        result = part if result is None else result + part
    return result


def brute_force(values) -> Summary:
    """Reference summary by direct enumeration (quadratic; for tests)."""
    values = list(values)
    if not values:
        raise ValueError("empty sequence")
    n = len(values)
    prefix = [0]
    for v in values:
        prefix.append(prefix[-1] + v)
    pre_min = min((prefix[e], e) for e in range(1, n + 1))
    pre_max = min((-prefix[e], e) for e in range(1, n + 1))
    suf_min = min((prefix[n] - prefix[s], s) for s in range(n))
    sub_min = min(
        (prefix[e] - prefix[s], s, e) for s in range(n) for e in range(s + 1, n + 1)
    )
    return Summary(n, prefix[n], pre_min, (-pre_max[0], pre_max[1]), suf_min, sub_min)
