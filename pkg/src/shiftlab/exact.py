"""Exact scaled rationals and exponent-carrying floats.

Forward-shift coefficients on the block sequence are of the form
``q * 2**e`` where ``e`` can be of order 10**10, far beyond what a
:class:`fractions.Fraction` can hold.  :class:`ScaledRational` keeps the
power of two separate so such values stay exact and cheap, and
:class:`ScaledFloat` does the same for rounded quantities (l^p norms
with p other than 1).
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import PrecisionBudgetExceeded

#: Largest shift (in bits) performed when two exponents must be aligned.
MAX_ALIGN_BITS = 1 << 24


def _two_adic(n: int) -> int:
    return (n & -n).bit_length() - 1


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an integer, or a decimal string into a Fraction."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text.strip())
    raise ValueError(f"not a rational: {text!r}")


class ScaledRational:
    """The exact value ``mant * 2**exp``.

    The mantissa is kept with an odd numerator and odd denominator, so two
    equal values always have identical fields.
    """

    __slots__ = ("num", "den", "exp")

    def __init__(self, value=0, exp: int = 0):
        q = value if isinstance(value, Fraction) else Fraction(value)
        n, d = q.numerator, q.denominator
        if n == 0:
            self.num, self.den, self.exp = 0, 1, 0
            return
        tz = _two_adic(n)
        if tz:
            n >>= tz
            exp += tz
        tz = _two_adic(d)
        if tz:
            d >>= tz
            exp -= tz
        self.num, self.den, self.exp = n, d, exp

    @classmethod
    def pow2(cls, exp: int) -> "ScaledRational":
        out = cls.__new__(cls)
        out.num, out.den, out.exp = 1, 1, exp
        return out

    @classmethod
    def _raw(cls, num: int, den: int, exp: int) -> "ScaledRational":
        out = cls.__new__(cls)
        out.num, out.den, out.exp = num, den, exp
        return out

    # -- conversions -----------------------------------------------------

    @property
    def mantissa(self) -> Fraction:
        return Fraction(self.num, self.den)

    def is_zero(self) -> bool:
        return self.num == 0

    def is_dyadic(self) -> bool:
        return self.den == 1

    def to_fraction(self) -> Fraction:
        if abs(self.exp) > MAX_ALIGN_BITS:
            raise PrecisionBudgetExceeded(f"2**{self.exp} is too large to expand")
        if self.exp >= 0:
            return Fraction(self.num << self.exp, self.den)
        return Fraction(self.num, self.den << -self.exp)

    def log2(self) -> float:
        """log2 of the absolute value (``-inf`` for zero)."""
        if self.num == 0:
            return -math.inf
        return math.log2(abs(self.num)) - math.log2(self.den) + self.exp

    def __float__(self) -> float:
        if self.num == 0:
            return 0.0
        est = self.log2()
        if est < -1100:
            return math.copysign(0.0, self.num)
        if est > 1100:
            raise OverflowError("value too large for a float")
        return math.ldexp(float(Fraction(self.num, self.den)), self.exp)

    def to_scaled_float(self) -> "ScaledFloat":
        if self.num == 0:
            return ScaledFloat(0.0, 0)
        n, d = abs(self.num), self.den
        shift = 64 - (n.bit_length() - d.bit_length())
        if shift >= 0:
            q = (n << shift) // d
        else:
            q = n // (d << -shift)
        m = math.copysign(float(q), self.num)
        return ScaledFloat(m, self.exp - shift)

    def to_string(self, max_digits: int = 64) -> str:
        """Exact text form.

        Dyadic values whose terminating decimal expansion has at most
        ``max_digits`` fractional digits are written in decimal; everything
        else as ``p/q`` or ``p/q*2^e``.
        """
        if self.num == 0:
            return "0"
        if self.den == 1:
            if self.exp >= 0:
                if self.exp <= MAX_ALIGN_BITS:
                    return str(self.num << self.exp)
            elif -self.exp <= max_digits:
                digits = -self.exp
                scaled = abs(self.num) * 5**digits
                body = str(scaled).rjust(digits + 1, "0")
                text = body[:-digits] + "." + body[-digits:]
                return ("-" if self.num < 0 else "") + text
            return f"{self.num}*2^{self.exp}"
        if abs(self.exp) <= max_digits:
            return str(self.to_fraction())
        return f"{self.num}/{self.den}*2^{self.exp}"

    def __repr__(self) -> str:
        return f"ScaledRational({self.to_string()})"

    # -- arithmetic ------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "ScaledRational | None":
        if isinstance(other, ScaledRational):
            return other
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return ScaledRational(Fraction(other))
        return None

    def mul_pow2(self, k: int) -> "ScaledRational":
        if self.num == 0:
            return self
        return ScaledRational._raw(self.num, self.den, self.exp + k)

    def __neg__(self):
        return ScaledRational._raw(-self.num, self.den, self.exp)

    def __abs__(self):
        return ScaledRational._raw(abs(self.num), self.den, self.exp)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.num == 0 or o.num == 0:
            return ScaledRational(0)
        n = self.num * o.num
        d = self.den * o.den
        g = math.gcd(n, d)
        return ScaledRational._raw(n // g, d // g, self.exp + o.exp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num == 0:
            raise ZeroDivisionError("division by zero")
        if self.num == 0:
            return self
        n = self.num * o.den
        d = self.den * abs(o.num)
        if o.num < 0:
            n = -n
        g = math.gcd(n, d)
        return ScaledRational._raw(n // g, d // g, self.exp - o.exp)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num == 0:
            return self
        if self.num == 0:
            return o
        e = min(self.exp, o.exp)
        sa, sb = self.exp - e, o.exp - e
        if max(sa, sb) > MAX_ALIGN_BITS:
            raise PrecisionBudgetExceeded(
                f"aligning exponents {self.exp} and {o.exp} needs {max(sa, sb)} bits"
            )
        q = Fraction(self.num << sa, self.den) + Fraction(o.num << sb, o.den)
        return ScaledRational(q, e)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    # -- comparison ------------------------------------------------------

    def _cmp(self, other: "ScaledRational") -> int:
        sa = (self.num > 0) - (self.num < 0)
        sb = (other.num > 0) - (other.num < 0)
        if sa != sb or sa == 0:
            return (sa > sb) - (sa < sb)
        # same nonzero sign: compare magnitudes, flip if negative
        an, bn = abs(self.num), abs(other.num)
        ba = an.bit_length() - self.den.bit_length() + self.exp
        bb = bn.bit_length() - other.den.bit_length() + other.exp
        if ba >= bb + 2:
            mag = 1
        elif bb >= ba + 2:
            mag = -1
        else:
            lhs = an * other.den
            rhs = bn * self.den
            gap = self.exp - other.exp
            if gap >= 0:
                lhs <<= gap
            else:
                rhs <<= -gap
            mag = (lhs > rhs) - (lhs < rhs)
        return mag * sa

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.num, self.den, self.exp) == (o.num, o.den, o.exp)

    def __hash__(self):
        return hash((self.num, self.den, self.exp))

    def __lt__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._cmp(o) < 0

    def __le__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._cmp(o) <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._cmp(o) > 0

    def __ge__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._cmp(o) >= 0

    def __bool__(self):
        return self.num != 0


class ScaledFloat:
    """A rounded value ``mant * 2**exp`` with ``0.5 <= |mant| < 1``.

    Used where a plain float would underflow.  ``rel_err`` is an upper
    bound on the relative rounding error accumulated so far.
    """

    __slots__ = ("mant", "exp", "rel_err")

    def __init__(self, mant: float, exp: int = 0, rel_err: float = 0.0):
        if mant == 0.0 or not math.isfinite(mant):
            self.mant, self.exp = mant, 0
        else:
            m, e = math.frexp(mant)
            self.mant, self.exp = m, exp + e
        self.rel_err = rel_err

    def log2(self) -> float:
        if self.mant == 0.0:
            return -math.inf
        return math.log2(abs(self.mant)) + self.exp

    def __float__(self) -> float:
        if self.mant == 0.0:
            return 0.0
        if self.exp < -1100:
            return 0.0
        if self.exp > 1100:
            raise OverflowError("value too large for a float")
        return math.ldexp(self.mant, self.exp)

    def to_string(self) -> str:
        if -1000 < self.exp < 1000:
            return repr(float(self))
        return f"{self.mant!r}*2^{self.exp}"

    def __repr__(self) -> str:
        return f"ScaledFloat({self.to_string()})"


def log2_of(value) -> float:
    """log2 of ``|value|`` for any of the numeric types used in the package."""
    if isinstance(value, (ScaledRational, ScaledFloat)):
        return value.log2()
    if isinstance(value, Fraction):
        if value == 0:
            return -math.inf
        return math.log2(abs(value.numerator)) - math.log2(value.denominator)
    if value == 0:
        return -math.inf
    return math.log2(abs(value))


def to_scaled_float(value) -> ScaledFloat:
    if isinstance(value, ScaledFloat):
        return value
    if isinstance(value, ScaledRational):
        return value.to_scaled_float()
    if isinstance(value, (int, Fraction)):
        return ScaledRational(Fraction(value)).to_scaled_float()
    return ScaledFloat(float(value))


def leq_rel(a, b, rel_tol: float = 0.0) -> bool:
    """Whether ``|a| <= |b| * (1 + rel_tol)``.

    Exact when both sides are :class:`ScaledRational` and ``rel_tol`` is 0;
    otherwise mantissas are compared in floating point after the binary
    exponents have been matched exactly.
    """
    if rel_tol == 0.0 and isinstance(a, ScaledRational) and isinstance(b, ScaledRational):
        return abs(a) <= abs(b)
    fa, fb = to_scaled_float(a), to_scaled_float(b)
    if fa.mant == 0.0:
        return True
    if fb.mant == 0.0:
        return False
    gap = fa.exp - fb.exp
    if gap > 2:
        return False
    if gap < -2:
        return True
    return abs(fa.mant) * 2.0**gap <= abs(fb.mant) * (1.0 + rel_tol)
