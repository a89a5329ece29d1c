"""Weighted backward and forward shifts on finitely supported vectors.

Coefficients are :class:`~shiftlab.exact.ScaledRational` by default, so
``S^n x`` stays exact even when ``n`` is around 10**10 and the
coefficients are of size ``2**-(10**10)``.  Float coefficients are only
meant for general (non-dyadic) weights.

An infinitely supported vector is represented by a finite truncation;
bounding the discarded tail is the caller's business.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import FormatError, IndexBeyondMaterialized, InsufficientDepth, ZeroVector
from .exact import ScaledFloat, ScaledRational, parse_rational
from .verdict import Status, Verdict
from .weights import RunLengthWeights

_ULP = 2.0**-52


def _as_coef(value):
    if isinstance(value, (ScaledRational, float)):
        return value
    if isinstance(value, (int, Fraction, str)):
        return ScaledRational(parse_rational(value))
    raise TypeError(f"unsupported coefficient {value!r}")


class SparseVector:
    """A finitely supported sequence ``x = sum x_i e_i``; zero entries are dropped."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean = {}
        for i, c in items:
            i = int(i)
            if i < 0:
                raise ValueError("indices are natural numbers")
            c = _as_coef(c)
            if c:
                clean[i] = c
        self._entries = dict(sorted(clean.items()))

    @classmethod
    def basis(cls, n: int) -> "SparseVector":
        return cls({n: 1})

    @classmethod
    def from_json(cls, obj) -> "SparseVector":
        if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
            raise FormatError("a vector file holds {'entries': [[index, 'p/q'], ...]}")
        pairs = []
        for item in obj["entries"]:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise FormatError(f"bad vector entry {item!r}")
            try:
                idx = int(item[0])
                val = parse_rational(item[1])
            except (TypeError, ValueError, ZeroDivisionError):
                raise FormatError(f"bad vector entry {item!r}") from None
            if idx < 0:
                raise FormatError(f"negative index {idx}")
            pairs.append((idx, val))
        return cls(pairs)

    def to_json(self) -> dict:
        return {"entries": [[str(i), _coef_text(c)] for i, c in self._entries.items()]}

    def items(self):
        return self._entries.items()

    @property
    def support(self) -> list[int]:
        return list(self._entries)

    @property
    def exact(self) -> bool:
        return all(isinstance(c, ScaledRational) for c in self._entries.values())

    def is_zero(self) -> bool:
        return not self._entries

    def max_index(self) -> int:
        return max(self._entries) if self._entries else -1

    def __getitem__(self, i: int):
        return self._entries.get(i, ScaledRational(0))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self._entries == other._entries

    def __add__(self, other: "SparseVector") -> "SparseVector":
        out = dict(self._entries)
        for i, c in other.items():
            out[i] = out[i] + c if i in out else c
        return SparseVector(out)

    def to_float(self) -> "SparseVector":
        return SparseVector({i: float(c) for i, c in self._entries.items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {_coef_text(c)}" for i, c in self._entries.items())
        return f"SparseVector({{{body}}})"


def _coef_text(c) -> str:
    return c.to_string() if isinstance(c, ScaledRational) else repr(c)


# ---------------------------------------------------------------------------
# weights acting on coefficients


def _scale_by_weight(seq, n: int, c, inverse: bool):
    """``c * w_n`` (or ``c / w_n``)."""
    w = seq.weight_at(n)
    if isinstance(seq, RunLengthWeights):
        e = -w if inverse else w
        if isinstance(c, ScaledRational):
            return c.mul_pow2(e)
        return math.ldexp(c, e)
    if isinstance(c, ScaledRational):
        return c / w if inverse else c * w
    return c / float(w) if inverse else c * float(w)


def _scale_by_product(seq, i: int, j: int, c, inverse: bool):
    """``c * M_i^j`` (or divided by it)."""
    if isinstance(seq, RunLengthWeights):
        e = seq.partial_product(i, j).exponent
        e = -e if inverse else e
        if isinstance(c, ScaledRational):
            return c.mul_pow2(e)
        return math.ldexp(c, e)
    if isinstance(c, ScaledRational):
        prod = Fraction(1)
        for m in range(i, i + j):
            prod *= seq.weight_at(m)
        return c / prod if inverse else c * prod
    _need(seq, i + j - 1)
    lg = seq.prefix_exponent(i + j) - seq.prefix_exponent(i)
    return c * 2.0 ** (-lg if inverse else lg)


def _need(seq, last: int) -> None:
    if last >= seq.total_length:
        raise IndexBeyondMaterialized(
            f"needs weight index {last}, only {seq.total_length} materialized"
        )


def backward_shift(seq, x: SparseVector) -> SparseVector:
    """``B_w x``: coordinate ``n`` moves to ``n - 1`` scaled by ``w_n``; ``x_0`` is dropped."""
    _need(seq, x.max_index())
    return SparseVector(
        (n - 1, _scale_by_weight(seq, n, c, inverse=False)) for n, c in x.items() if n >= 1
    )


def forward_shift(seq, x: SparseVector) -> SparseVector:
    """``S x``: coordinate ``i`` moves to ``i + 1`` divided by ``w_{i+1}``."""
    _need(seq, x.max_index() + 1)
    return SparseVector((i + 1, _scale_by_weight(seq, i + 1, c, inverse=True)) for i, c in x.items())


def forward_shift_power(seq, x: SparseVector, n: int) -> SparseVector:
    """``S^n x``: coordinate ``i`` moves to ``i + n`` divided by ``M_{i+1}^n``."""
    if n < 0:
        raise ValueError("n must be natural")
    if n == 0 or x.is_zero():
        return x
    _need(seq, x.max_index() + n)
    return SparseVector((i + n, _scale_by_product(seq, i + 1, n, c, inverse=True)) for i, c in x.items())


def backward_shift_power(seq, x: SparseVector, n: int) -> SparseVector:
    """``B_w^n x``: coordinate ``i >= n`` moves to ``i - n`` times ``M_{i-n+1}^n``."""
    if n < 0:
        raise ValueError("n must be natural")
    if n == 0 or x.is_zero():
        return x
    _need(seq, x.max_index())
    return SparseVector(
        (i - n, _scale_by_product(seq, i - n + 1, n, c, inverse=False))
        for i, c in x.items()
        if i >= n
    )


#: Above this power the right-inverse check applies B_w^n in closed form.
ITERATE_LIMIT = 100_000


def verify_right_inverse(seq, x: SparseVector, n: int):
    """Check ``B_w^n (S^n x) = x`` coefficient by coefficient.

    ``S^n`` uses the closed formula; ``B_w^n`` is applied one step at a
    time (up to :data:`ITERATE_LIMIT`) so the two sides are computed by
    different routes.
    """
    y = forward_shift_power(seq, x, n)
    if n <= ITERATE_LIMIT:
        for _ in range(n):
            y = backward_shift(seq, y)
        route = "iterated"
    else:
        y = backward_shift_power(seq, y, n)
        route = "closed-form"
    if y == x:
        return Verdict(Status.HOLDS_EXACTLY, horizon=n, witness={"route": route},
                       narrative=f"B_w^{n} S^{n} x = x ({route})")
    bad = sorted(set(x.support) ^ set(y.support) | {i for i in x.support if x[i] != y[i]})
    return Verdict(Status.FAILS_WITH_WITNESS, horizon=n, witness={"index": bad[0], "route": route},
                   narrative=f"coefficient {bad[0]} differs after B_w^{n} S^{n}")


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class SpaceNorm:
    """``l^p`` (``p >= 1`` rational) or the sup norm of ``c_0``."""

    kind: str
    p: Fraction | None = None

    def __post_init__(self):
        if self.kind == "lp":
            if self.p is None or Fraction(self.p) < 1:
                raise ValueError("l^p needs a rational p >= 1")
            object.__setattr__(self, "p", Fraction(self.p))
        elif self.kind == "sup":
            if self.p is not None:
                raise ValueError("the sup norm takes no exponent")
        else:
            raise ValueError(f"unknown norm kind {self.kind!r}")

    @classmethod
    def lp(cls, p) -> "SpaceNorm":
        return cls("lp", Fraction(p))

    @classmethod
    def sup(cls) -> "SpaceNorm":
        return cls("sup")

    @classmethod
    def parse(cls, text: str) -> "SpaceNorm":
        text = text.strip().lower()
        if text in ("sup", "c0", "inf", "linf"):
            return cls.sup()
        if text.startswith("l"):
            try:
                return cls.lp(parse_rational(text[1:].lstrip(":")))
            except (ValueError, ZeroDivisionError):
                pass
        raise ValueError(f"unknown norm {text!r} (use l1, l2, l<p> or sup)")

    @property
    def name(self) -> str:
        return "sup" if self.kind == "sup" else f"l{self.p}"

    @property
    def exact(self) -> bool:
        return self.kind == "sup" or self.p == 1


def norm(x: SparseVector, space: SpaceNorm):
    """Norm of ``x``.

    Exact (a ScaledRational) for ``l^1`` and sup on exact coefficients.
    Every other case is a :class:`ScaledFloat` whose ``rel_err`` bounds
    the rounding error.
    """
    coefs = [c for _, c in x.items()]
    if not coefs:
        return ScaledRational(0)
    if x.exact and space.exact:
        if space.kind == "sup":
            return max(abs(c) for c in coefs)
        total = ScaledRational(0)
        for c in coefs:
            total = total + abs(c)
        return total
    parts = []
    for c in coefs:
        f = c.to_scaled_float() if isinstance(c, ScaledRational) else ScaledFloat(c)
        parts.append((abs(f.mant), f.exp))
    top = max(e for _, e in parts)
    if space.kind == "sup":
        m, e = max(parts, key=lambda t: (t[1], t[0]))
        return ScaledFloat(m, e, rel_err=_ULP)
    p = float(space.p)
    s = math.fsum(math.ldexp(m, e - top) ** p for m, e in parts)
    err = (len(parts) * (p + 2) + 2) * _ULP
    return ScaledFloat(s ** (1.0 / p), top, rel_err=err)


# ---------------------------------------------------------------------------
# decay along recovery times


def decay_profile(seq, x: SparseVector, times, space: SpaceNorm) -> list[tuple[int, int, object]]:
    """``(k, n_k, ||S^{n_k} x||)`` for each recovery time."""
    if x.is_zero():
        raise ZeroVector("the decay profile of the zero vector is trivial")
    items = times.items() if hasattr(times, "items") else list(times)
    out = []
    for k, n_k in items:
        if x.max_index() + n_k >= seq.total_length:
            raise InsufficientDepth(f"S^{n_k} x reaches past the materialized weights")
        out.append((k, n_k, norm(forward_shift_power(seq, x, n_k), space)))
    return out


def value_text(value) -> str:
    """Text for a norm value: exact decimal when short and dyadic."""
    if isinstance(value, (ScaledRational, ScaledFloat)):
        return value.to_string()
    return repr(value)


__all__ = [
    "SparseVector",
    "SpaceNorm",
    "backward_shift",
    "backward_shift_power",
    "decay_profile",
    "forward_shift",
    "forward_shift_power",
    "norm",
    "value_text",
    "verify_right_inverse",
]
