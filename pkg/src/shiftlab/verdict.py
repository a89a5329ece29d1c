"""Finite-horizon verdicts.

Every check in the package answers with a :class:`Verdict`.  The
properties being probed (``sup = inf``, ``lim = inf``, density of an
orbit...) are asymptotic, so a verdict never claims more than what was
actually computed up to its horizon.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exact import ScaledFloat, ScaledRational


class Status(str, enum.Enum):
    HOLDS_EXACTLY = "HoldsExactly"
    HOLDS_WITH_BOUND = "HoldsWithBound"
    HOLDS_UP_TO_HORIZON = "HoldsUpToHorizon"
    FAILS_WITH_WITNESS = "FailsWithWitness"
    EVIDENCE_FOR = "EvidenceFor"
    EVIDENCE_AGAINST = "EvidenceAgainst"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    status: Status
    horizon: int | None = None
    witness: Any = None
    narrative: str = ""
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.status is Status.FAILS_WITH_WITNESS and self.witness is None:
            raise ValueError("a failing verdict must carry a witness")

    @property
    def failed(self) -> bool:
        return self.status is Status.FAILS_WITH_WITNESS

    @property
    def holds(self) -> bool:
        return self.status in (
            Status.HOLDS_EXACTLY,
            Status.HOLDS_WITH_BOUND,
            Status.HOLDS_UP_TO_HORIZON,
        )

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "horizon": jsonable(self.horizon),
            "witness": jsonable(self.witness),
            "narrative": self.narrative,
            "flags": list(self.flags),
        }


def jsonable(value):
    """Convert a payload to JSON-ready form.

    Integers become decimal strings (they are routinely beyond 2**53),
    exact values use their exact text form, and mappings get string keys.
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (ScaledRational, ScaledFloat)):
        return value.to_string()
    if isinstance(value, Verdict):
        return value.to_dict()
    if isinstance(value, dict):
        return {str(jsonable(k)): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    raise TypeError(f"cannot serialize {type(value).__name__}")
