"""Four small dynamical systems with exact region arithmetic.

* :class:`Tent` on ``[0, 1]``, regions are closed :class:`Interval` s.
* :class:`Doubling` ``z -> z^2`` on the circle (angles in turns), regions
  are closed :class:`Arc` s.
* :class:`Shift` on one-sided 0-1 sequences, regions are :class:`Cylinder` s.
* :class:`RotationSystem` by a rational angle ``p/q`` standing in for an
  irrational one, regions are open :class:`CircleBall` s.

Everything is exact :class:`fractions.Fraction` arithmetic.  Angles are
measured in turns and the circle metric is arc length in turns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    FixedPointInput,
    FormatError,
    HorizonExceedsPeriod,
    LengthMismatch,
    NonInjectiveSystem,
    RegionSystemMismatch,
)
from .exact import parse_rational
from .verdict import Status, Verdict

HALF = Fraction(1, 2)
DEFAULT_SYMBOL_DEPTH = 64
DEFAULT_THETA = Fraction(305, 987)


def frac(x: Fraction) -> Fraction:
    """``x mod 1`` in ``[0, 1)``."""
    return x - math.floor(x)


def circle_distance(x, y) -> Fraction:
    """Arc-length distance in turns, in ``[0, 1/2]``."""
    d = frac(Fraction(x) - Fraction(y))
    return min(d, 1 - d)


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with ``0 <= lo < hi <= 1``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not 0 <= lo < hi <= 1:
            raise ValueError(f"need 0 <= lo < hi <= 1, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def is_full(self) -> bool:
        return self.lo == 0 and self.hi == 1

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {"type": "interval", "lo": str(self.lo), "hi": str(self.hi)}


@dataclass(frozen=True)
class Arc:
    """Closed arc of points within ``halfwidth`` turns of ``center``.

    ``halfwidth == 1/2`` is the whole circle.
    """

    center: Fraction
    halfwidth: Fraction

    def __post_init__(self):
        h = Fraction(self.halfwidth)
        if not 0 < h <= HALF:
            raise ValueError(f"need 0 < halfwidth <= 1/2, got {h}")
        object.__setattr__(self, "center", frac(Fraction(self.center)))
        object.__setattr__(self, "halfwidth", h)

    @property
    def width(self) -> Fraction:
        return 2 * self.halfwidth

    def is_full(self) -> bool:
        return self.halfwidth == HALF

    def contains(self, x) -> bool:
        return circle_distance(x, self.center) <= self.halfwidth

    def to_json(self) -> dict:
        return {"type": "arc", "center": str(self.center), "halfwidth": str(self.halfwidth)}


@dataclass(frozen=True)
class Cylinder:
    """Sequences starting with ``prefix``; the empty prefix is the whole space."""

    prefix: str

    def __post_init__(self):
        if set(self.prefix) - {"0", "1"}:
            raise ValueError(f"prefix must be a 0-1 string, got {self.prefix!r}")

    def is_full(self) -> bool:
        return self.prefix == ""

    def contains(self, bits: str) -> bool:
        return bits.startswith(self.prefix)

    def to_json(self) -> dict:
        return {"type": "cylinder", "prefix": self.prefix}


@dataclass(frozen=True)
class CircleBall:
    """Open ball ``{z : d(z, center) < radius}`` on the circle, radius in ``(0, 1/2]``."""

    center: Fraction
    radius: Fraction

    def __post_init__(self):
        r = Fraction(self.radius)
        if not 0 < r <= HALF:
            raise ValueError(f"need 0 < radius <= 1/2, got {r}")
        object.__setattr__(self, "center", frac(Fraction(self.center)))
        object.__setattr__(self, "radius", r)

    def is_full(self) -> bool:
        return False  # an open ball of radius 1/2 misses its antipode

    def contains(self, x) -> bool:
        return circle_distance(x, self.center) < self.radius

    def to_json(self) -> dict:
        return {"type": "ball", "center": str(self.center), "radius": str(self.radius)}


Region = Union[Interval, Arc, Cylinder, CircleBall]


def region_from_json(obj) -> Region:
    if not isinstance(obj, dict):
        raise FormatError("a region is a JSON object")
    kind = obj.get("type")
    try:
        if kind == "interval":
            return Interval(parse_rational(obj["lo"]), parse_rational(obj["hi"]))
        if kind == "arc":
            return Arc(parse_rational(obj["center"]), parse_rational(obj["halfwidth"]))
        if kind == "cylinder":
            return Cylinder(str(obj["prefix"]))
        if kind == "ball":
            return CircleBall(parse_rational(obj["center"]), parse_rational(obj["radius"]))
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad {kind} region: {exc}") from None
    raise FormatError(f"unknown region type {kind!r}")


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class SymbolSpace:
    """0-1 sequences truncated at ``depth`` coordinates for metric purposes."""

    depth: int = DEFAULT_SYMBOL_DEPTH

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be positive")


@dataclass(frozen=True)
class Tent:
    name = "tent"
    region_type = Interval
    injective = False

    def point(self, x: Fraction) -> Fraction:
        return 2 * x if x <= HALF else 2 - 2 * x


@dataclass(frozen=True)
class Doubling:
    name = "doubling"
    region_type = Arc
    injective = False

    def point(self, x: Fraction) -> Fraction:
        return frac(2 * x)


@dataclass(frozen=True)
class Shift:
    name = "shift"
    region_type = Cylinder
    injective = False
    space: SymbolSpace = SymbolSpace()

    def point(self, bits: str) -> str:
        return bits[1:]


@dataclass(frozen=True)
class RotationSystem:
    """Rotation by ``theta = p/q`` turns.

    A rational angle is periodic with period ``q``; every query is limited
    to horizons below ``q`` so that periodicity cannot pass for recurrence.
    """

    theta: Fraction = DEFAULT_THETA
    name = "rotation"
    region_type = CircleBall
    injective = True

    def __post_init__(self):
        t = Fraction(self.theta)
        if not 0 < t < 1:
            raise ValueError(f"rotation angle must lie in (0, 1), got {t}")
        object.__setattr__(self, "theta", t)

    @classmethod
    def from_convergent(cls, target: float, max_denominator: int) -> "RotationSystem":
        """Best rational approximation of ``target`` with bounded denominator."""
        return cls(Fraction(target).limit_denominator(max_denominator))

    @property
    def period(self) -> int:
        return self.theta.denominator

    def point(self, x: Fraction) -> Fraction:
        return frac(x + self.theta)

    def check_horizon(self, horizon: int) -> None:
        if horizon >= self.period:
            raise HorizonExceedsPeriod(
                f"horizon {horizon} must stay below the period {self.period} of theta = {self.theta}"
            )


System = Union[Tent, Doubling, Shift, RotationSystem]


def system_from_json(obj) -> System:
    if not isinstance(obj, dict):
        raise FormatError("a system descriptor is a JSON object")
    kind = obj.get("system")
    try:
        if kind == "tent":
            return Tent()
        if kind == "doubling":
            return Doubling()
        if kind == "shift":
            return Shift(SymbolSpace(int(obj.get("depth", DEFAULT_SYMBOL_DEPTH))))
        if kind == "rotation":
            return RotationSystem(parse_rational(obj.get("theta", str(DEFAULT_THETA))))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad {kind} system: {exc}") from None
    raise FormatError(f"unknown system {kind!r}")


def system_to_json(system: System) -> dict:
    out = {"system": system.name}
    if isinstance(system, RotationSystem):
        out["theta"] = str(system.theta)
    if isinstance(system, Shift):
        out["depth"] = str(system.space.depth)
    return out


# ---------------------------------------------------------------------------
# images


def _check_region(system: System, region) -> None:
    if not isinstance(region, system.region_type):
        raise RegionSystemMismatch(
            f"{system.name} works on {system.region_type.__name__} regions, got {type(region).__name__}"
        )


def _merge_intervals(parts: Iterable[Interval]) -> list[Interval]:
    out: list[Interval] = []
    for iv in sorted(parts, key=lambda r: (r.lo, r.hi)):
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return out


def _image_one(system: System, region) -> list:
    _check_region(system, region)
    if isinstance(system, Tent):
        lo, hi = region.lo, region.hi
        if hi <= HALF:
            return [Interval(2 * lo, 2 * hi)]
        if lo >= HALF:
            return [Interval(2 - 2 * hi, 2 - 2 * lo)]
        return [Interval(min(2 * lo, 2 - 2 * hi), 1)]
    if isinstance(system, Doubling):
        return [Arc(2 * region.center, min(2 * region.halfwidth, HALF))]
    if isinstance(system, Shift):
        return [Cylinder(region.prefix[1:])]
    return [CircleBall(region.center + system.theta, region.radius)]


def _normalize(system: System, regions: list) -> list:
    if isinstance(system, Tent):
        return _merge_intervals(regions)
    if any(r.is_full() for r in regions):
        return [next(r for r in regions if r.is_full())]
    return list(dict.fromkeys(regions))


def image(system: System, regions) -> list:
    """Exact forward image of a region (or a list of regions) as a list of regions."""
    if not isinstance(regions, (list, tuple)):
        regions = [regions]
    out = []
    for r in regions:
        out.extend(_image_one(system, r))
    return _normalize(system, out)


def image_power(system: System, regions, n: int) -> list:
    if not isinstance(regions, (list, tuple)):
        regions = [regions]
    regions = list(regions)
    for _ in range(n):
        if len(regions) == 1 and regions[0].is_full():
            break
        regions = image(system, regions)
    return regions


def _is_whole_space(regions: list) -> bool:
    return any(r.is_full() for r in regions)


def _intersects(a, b) -> bool:
    if isinstance(a, Interval):
        return a.lo <= b.hi and b.lo <= a.hi
    if isinstance(a, Arc):
        return circle_distance(a.center, b.center) <= a.halfwidth + b.halfwidth
    if isinstance(a, Cylinder):
        return a.prefix.startswith(b.prefix) or b.prefix.startswith(a.prefix)
    return circle_distance(a.center, b.center) < a.radius + b.radius


# ---------------------------------------------------------------------------
# covering


def tent_soft_bound(length: Fraction) -> int:
    """``ceil(log2(2 / L))``, the expected covering time for an interval of length ``L``."""
    q = Fraction(2) / length
    e = q.numerator.bit_length() - q.denominator.bit_length()
    while Fraction(2) ** e < q:
        e += 1
    while e > 0 and Fraction(2) ** (e - 1) >= q:
        e -= 1
    return e


def covering_time(system: System, region, max_j: int = 256) -> Verdict:
    """Smallest ``j <= max_j`` with ``T^j(U)`` equal to the whole space."""
    if isinstance(system, RotationSystem):
        raise RegionSystemMismatch("a rotation never maps a ball onto the whole circle")
    _check_region(system, region)
    current = [region]
    for j in range(max_j + 1):
        if _is_whole_space(current):
            witness = {"j": j}
            flags: tuple[str, ...] = ()
            if isinstance(system, Tent):
                bound = tent_soft_bound(region.length)
                witness["soft_bound"] = bound
                if j > bound:
                    flags = ("soft-bound-exceeded",)
            return Verdict(Status.HOLDS_EXACTLY, horizon=max_j, witness=witness,
                           narrative=f"T^{j}(U) is the whole space", flags=flags)
        current = image(system, current)
    return Verdict(Status.INCONCLUSIVE, horizon=max_j, witness={"last_image": [r.to_json() for r in current]},
                   narrative=f"T^j(U) is not the whole space for j <= {max_j}")


# ---------------------------------------------------------------------------
# return sets


def return_set(system: System, u, v, horizon: int) -> list[int]:
    """``N(U, V)`` intersected with ``[0, horizon]``."""
    _check_region(system, u)
    _check_region(system, v)
    if isinstance(system, RotationSystem):
        system.check_horizon(horizon)
        reach = u.radius + v.radius
        return [n for n in range(horizon + 1)
                if circle_distance(u.center + n * system.theta, v.center) < reach]
    out = []
    current = [u]
    for n in range(horizon + 1):
        if _is_whole_space(current):
            out.extend(range(n, horizon + 1))
            break
        if any(_intersects(r, v) for r in current):
            out.append(n)
        current = image(system, current)
    return out


def no_consecutive_returns(rotation: RotationSystem, a=0, horizon: int = 900) -> Verdict:
    """Check that ``N(U, U)`` has no two consecutive members up to the horizon.

    ``delta = d(Ta, a)`` and ``U`` is the open ball of radius ``delta / 4`` at ``a``.
    """
    if not isinstance(rotation, RotationSystem):
        raise RegionSystemMismatch("no_consecutive_returns needs a rotation")
    rotation.check_horizon(horizon)
    a = frac(Fraction(a))
    delta = circle_distance(rotation.point(a), a)
    ball = CircleBall(a, delta / 4)
    hits = return_set(rotation, ball, ball, horizon)
    flags = ("degenerate: T^2 is the identity",) if 2 * rotation.theta == 1 else ()
    positive = [n for n in hits if n >= 1]
    witness = {"delta": delta, "radius": ball.radius, "returns": len(positive),
               "first_returns": positive[:16]}
    hit = set(hits)
    for n in hits:
        if n + 1 in hit:
            witness["n"] = n
            return Verdict(Status.FAILS_WITH_WITNESS, horizon=horizon, witness=witness,
                           narrative=f"both {n} and {n + 1} are return times", flags=flags)
    return Verdict(Status.HOLDS_UP_TO_HORIZON, horizon=horizon, witness=witness,
                   narrative=f"{len(positive)} positive return times, none consecutive", flags=flags)


def strong_transitivity_cover(rotation: RotationSystem, a, delta, targets: Sequence, horizon: int) -> Verdict:
    """Minimal ``j <= horizon`` with ``d(x, a + j theta) < delta`` for each target ``x``.

    Along the way the identity ``T^j(B_delta(a)) = B_delta(T^j a)`` is
    checked by iterating the exact ball image.
    """
    if not isinstance(rotation, RotationSystem):
        raise RegionSystemMismatch("strong_transitivity_cover needs a rotation")
    rotation.check_horizon(horizon)
    delta = Fraction(delta)
    if not 0 < delta <= HALF:
        raise ValueError("delta must lie in (0, 1/2]")
    a = frac(Fraction(a))
    targets = [frac(Fraction(t)) for t in targets]
    ball = CircleBall(a, delta)
    orbit = [a]
    for j in range(1, horizon + 1):
        ball = image(rotation, ball)[0]
        orbit.append(frac(a + j * rotation.theta))
        if ball != CircleBall(orbit[-1], delta):
            return Verdict(Status.FAILS_WITH_WITNESS, horizon=horizon, witness={"j": j},
                           narrative=f"T^{j}(B_delta(a)) differs from B_delta(T^{j} a)")
    times = {}
    for x in targets:
        times[x] = next((j for j, z in enumerate(orbit) if circle_distance(x, z) < delta), None)
    missing = [x for x, j in times.items() if j is None]
    witness = {"times": [[x, j] for x, j in times.items()], "uncovered": missing,
               "ball_identity_checked_up_to": horizon}
    if missing:
        return Verdict(Status.INCONCLUSIVE, horizon=horizon, witness=witness,
                       narrative=f"{len(missing)} targets not reached within the horizon")
    return Verdict(Status.EVIDENCE_FOR, horizon=horizon, witness=witness,
                   narrative=f"all {len(targets)} targets lie in some T^j(B_delta(a))",
                   flags=("finite-horizon",))


def separation_region(system: System, x, horizon: int) -> tuple[Region, Verdict]:
    """A ball ``U`` around ``x`` with ``T^n(U)`` and ``T^(n+1)(U)`` disjoint for ``n <= horizon``.

    With ``eps = d(x, Tx)`` and an isometry (``delta = eps / 2`` as modulus
    of continuity for the target ``eps / 2``) the radius is
    ``rho = min(delta, eps / 2) = eps / 2``.
    """
    if not system.injective:
        raise NonInjectiveSystem(f"the {system.name} map is not injective")
    system.check_horizon(horizon)
    x = frac(Fraction(x))
    eps = circle_distance(x, system.point(x))
    if eps == 0:
        raise FixedPointInput(f"{x} is fixed by T")
    delta = eps / 2
    rho = min(delta, eps / 2)
    u = CircleBall(x, rho)
    current = u
    for n in range(horizon + 1):
        nxt = image(system, current)[0]
        if _intersects(current, nxt):
            return u, Verdict(Status.FAILS_WITH_WITNESS, horizon=horizon, witness={"n": n},
                              narrative=f"T^{n}(U) meets T^{n + 1}(U)")
        current = nxt
    return u, Verdict(Status.HOLDS_UP_TO_HORIZON, horizon=horizon,
                      witness={"epsilon": eps, "delta": delta, "radius": rho},
                      narrative=f"T^n(U) and T^(n+1)(U) are disjoint for n <= {horizon}")


# ---------------------------------------------------------------------------
# symbol metric


@dataclass(frozen=True)
class SymbolDistance:
    """``value`` is the exact truncated sum; the true distance lies in ``[value, value + tail]``."""

    value: Fraction
    tail: Fraction

    @property
    def upper(self) -> Fraction:
        return self.value + self.tail

    def to_dict(self) -> dict:
        return {"value": str(self.value), "tail": str(self.tail), "upper": str(self.upper)}


def symbol_metric(space: SymbolSpace, x: str, y: str) -> SymbolDistance:
    """``sum_{n} |x_n - y_n| / 2^n`` over ``n <= space.depth`` plus a certified tail.

    Only the coordinates actually supplied (at most ``depth + 1`` of them)
    enter the sum; the unseen coordinates contribute at most
    ``2^(1 - m)`` where ``m`` is the number of coordinates used, which is
    ``2^-depth`` when ``depth + 1`` bits are given.
    """
    if len(x) != len(y):
        raise LengthMismatch(f"sequences of lengths {len(x)} and {len(y)}")
    if len(x) < space.depth:
        raise LengthMismatch(f"need at least {space.depth} coordinates, got {len(x)}")
    if (set(x) | set(y)) - {"0", "1"}:
        raise ValueError("sequences must be 0-1 strings")
    m = min(len(x), space.depth + 1)
    num = 0
    for n in range(m):
        num = 2 * num + (x[n] != y[n])
    return SymbolDistance(Fraction(num, 2 ** (m - 1)), Fraction(1, 2 ** (m - 1)))


__all__ = [
    "Arc",
    "CircleBall",
    "Cylinder",
    "Doubling",
    "Interval",
    "RotationSystem",
    "Shift",
    "SymbolDistance",
    "SymbolSpace",
    "Tent",
    "circle_distance",
    "covering_time",
    "image",
    "image_power",
    "no_consecutive_returns",
    "region_from_json",
    "return_set",
    "separation_region",
    "strong_transitivity_cover",
    "symbol_metric",
    "system_from_json",
    "system_to_json",
    "tent_soft_bound",
]
