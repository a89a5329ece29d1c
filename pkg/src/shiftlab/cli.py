"""Command-line front end.

Exit status: 0 when every verdict is non-failing, 1 when some verdict is
FailsWithWitness, 2 on bad arguments, unreadable input or a check that
cannot run at the requested depth or horizon.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from importlib import resources

from . import __version__
from .classifiers import (
    check_hypermixing_condition,
    check_mixing,
    check_transitive,
    strong_transitivity_evidence,
)
from .construction import (
    DEFAULT_DEPTH,
    DEFAULT_SAMPLES,
    build_construction,
    count_block_entries,
    recovery_times,
    verify_balance,
    verify_easy_estimate,
    verify_hard_estimate,
)
from .errors import FormatError, ShiftlabError
from .exact import ScaledFloat, ScaledRational, leq_rel, parse_rational
from .shifts import SpaceNorm, SparseVector, decay_profile, norm, value_text
from .systems import (
    Arc,
    CircleBall,
    Cylinder,
    Doubling,
    Interval,
    RotationSystem,
    Shift,
    Tent,
    covering_time,
    no_consecutive_returns,
    region_from_json,
    return_set,
    separation_region,
    strong_transitivity_cover,
    system_from_json,
    system_to_json,
)
from .verdict import Status, Verdict, jsonable
from .weights import GeneralWeights, weights_from_json

DEFAULT_NORMS = ("l1", "l2", "sup")
#: Relative tolerance for rounded (non-l1, non-sup) norm comparisons.
REL_TOL = 1e-12


def report_schema() -> dict:
    """The JSON schema every report conforms to."""
    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text("utf-8"))


class ConfigError(Exception):
    """Bad flag combination; reported with exit status 2."""


# ---------------------------------------------------------------------------
# argument parsing


def parse_k_range(text: str) -> tuple[int, int]:
    """``"3"`` or ``"2..5"`` (inclusive)."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}, expected K or K1..K2") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}")
    return lo, hi


def parse_tol(text: str):
    """A rational ``p/q``, a decimal, or ``2^-e``."""
    t = text.strip().replace("**", "^")
    try:
        if t.startswith("2^"):
            return ScaledRational.pow2(int(t[2:]))
        value = parse_rational(t)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad tolerance {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return ScaledRational(value)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=None, help=f"construction depth (default {DEFAULT_DEPTH})")
    common.add_argument("--horizon", type=int, default=None, help="largest n examined")
    common.add_argument("--k", type=parse_k_range, default=None, metavar="K1..K2", help="range of k")
    common.add_argument("--tol", type=parse_tol, default=None, help="tolerance, e.g. 2^-20 or 1/1000")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--input", default=None, help="input JSON file")
    common.add_argument("--output", default=None, help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="shiftlab", description="Weighted backward shift experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("construct", parents=[common], help="build the block weight sequence")

    v = sub.add_parser("verify", parents=[common], help="balance identity and product estimates")
    v.add_argument("--method", choices=("auto", "scan", "pointwise", "sampled"), default="auto")
    v.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    c = sub.add_parser("classify", parents=[common], help="transitivity, mixing, hypermixing, strong transitivity")
    c.add_argument("--vector", default=None, help="vector JSON for the strong transitivity search (default e_0)")

    s = sub.add_parser("shift", parents=[common], help="decay profiles of S^{n_k} x")
    s.add_argument("--norm", action="append", default=None, help="l1, l2, l<p> or sup (repeatable)")

    sub.add_parser("systems", parents=[common], help="tent, doubling, shift and rotation checks")
    return p


# ---------------------------------------------------------------------------
# helpers


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None


def _depth(args) -> int:
    depth = DEFAULT_DEPTH if args.depth is None else args.depth
    if depth < 3:
        raise ConfigError("--depth must be at least 3")
    return depth


def _k_range(args, depth: int, need: int) -> range:
    """Requested ``k`` values; by default every ``k`` with ``2k + need <= depth``."""
    if args.k is None:
        top = (depth - need) // 2
        if top < 1:
            raise ConfigError(f"depth {depth} leaves no admissible k")
        return range(1, top + 1)
    lo, hi = args.k
    return range(lo, hi + 1)


def _entry(check: str, verdict: Verdict, **extra) -> dict:
    row = {"check": check, **verdict.to_dict()}
    row.update(jsonable(extra))
    return row


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([jsonable(x) if not isinstance(x, str) else x for x in r])
    return buf.getvalue()


def _emit(args, report: dict, csv_text: str | None) -> None:
    if args.format == "csv":
        text = csv_text
    else:
        text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _failed(report: dict) -> bool:
    return any(r.get("status") == Status.FAILS_WITH_WITNESS.value for r in report.get("results", []))


# ---------------------------------------------------------------------------
# commands


def cmd_construct(args) -> tuple[dict, str]:
    depth = _depth(args)
    state = build_construction(depth)
    blocks = []
    for b in state.blocks:
        halves, ones, twos = count_block_entries(state, b.n)
        blocks.append({"n": b.n, "kind": b.kind.value, "length": b.length,
                       "halves": halves, "ones": ones, "twos": twos})
    report = {
        "command": "construct",
        "depth": depth,
        "total_length": state.total_length,
        "s_table": [{"n": n, "s": s} for n, s in sorted(state.s_table.items())],
        "blocks": blocks,
        "weights": state.weights.to_json(),
        "results": [],
    }
    rows = [(b["n"], b["kind"], b["length"], state.s(b["n"]), b["halves"], b["ones"], b["twos"])
            for b in blocks]
    return jsonable(report), _csv_text(("n", "kind", "length", "s_n", "halves", "ones", "twos"), rows)


def cmd_verify(args) -> tuple[dict, str]:
    depth = _depth(args)
    state = build_construction(depth)
    results = []
    for k in _k_range(args, depth, 3):
        results.append(_entry("balance", verify_balance(state, k), k=k))
        if k < 2:
            continue
        for name, fn in (("easy", verify_easy_estimate), ("hard", verify_hard_estimate)):
            v = fn(state, k, method=args.method, samples=args.samples, seed=args.seed)
            results.append(_entry(name, v, k=k, min_exponent=v.witness["min_exponent"],
                                  indices_checked=v.witness["indices_checked"]))
    report = {"command": "verify", "depth": str(depth), "seed": str(args.seed), "results": results}
    rows = [(r["k"], r["check"], r["status"], r.get("min_exponent", ""), r.get("indices_checked", ""))
            for r in results]
    return report, _csv_text(("k", "check", "status", "min_exponent", "indices_checked"), rows)


def _weights(args):
    if args.input:
        obj = _read_json(args.input)
        if isinstance(obj, dict) and obj.get("command") == "construct":
            obj = obj.get("weights")
        return weights_from_json(obj), "file"
    return build_construction(_depth(args)).weights, "construction"


def cmd_classify(args) -> tuple[dict, str]:
    seq, source = _weights(args)
    horizon = args.horizon if args.horizon is not None else seq.total_length - 1
    if not 1 <= horizon < seq.total_length:
        raise ConfigError(f"--horizon must lie in [1, {seq.total_length - 1}] for these weights")
    x = SparseVector.from_json(_read_json(args.vector)) if args.vector else SparseVector.basis(0)
    tol = args.tol
    if tol is not None and isinstance(seq, GeneralWeights):
        tol = float(tol)
    st_horizon = min(horizon, seq.total_length - 1 - max(x.max_index(), 0))
    if st_horizon < 1:
        raise ConfigError("the vector's support leaves no room for S^n x")
    checks = [
        ("transitive", check_transitive(seq, horizon), "records"),
        ("mixing", check_mixing(seq, horizon), "witnesses"),
        ("hypermixing", check_hypermixing_condition(seq, horizon), "window"),
        ("strong_transitivity", strong_transitivity_evidence(seq, x, st_horizon, tol), "times"),
    ]
    results = []
    for name, v, key in checks:
        wit = v.witness[key]
        row = {"criterion": name, **v.to_dict(), "witnesses": jsonable(wit if isinstance(wit, list) else [wit])}
        results.append(row)
    report = {"command": "classify", "source": source, "horizon": str(horizon), "results": results}
    rows = [(r["criterion"], r["status"], r["horizon"], r["narrative"]) for r in results]
    return report, _csv_text(("criterion", "status", "horizon", "narrative"), rows)


def cmd_shift(args) -> tuple[dict, str]:
    depth = _depth(args)
    state = build_construction(depth)
    x = SparseVector.from_json(_read_json(args.input)) if args.input else SparseVector.basis(0)
    if x.is_zero():
        raise ConfigError("the input vector is zero")
    if args.k is not None:
        k_lo, k_hi = args.k
    else:
        # every k whose S^{n_k} x stays inside the materialized weights
        k_lo, k_hi = 1, (depth - 2) // 2
        while k_hi >= 1 and x.max_index() + state.s(2 * k_hi + 2) >= state.total_length:
            k_hi -= 1
        if k_hi < 1:
            raise ConfigError(f"depth {depth} is too small for a vector supported up to {x.max_index()}")
    times = recovery_times(state, k_hi)
    times = {k: n for k, n in times.items() if k >= k_lo}
    try:
        spaces = [SpaceNorm.parse(t) for t in (args.norm or DEFAULT_NORMS)]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    results, rows = [], []
    top = x.max_index()
    for space in spaces:
        base = norm(x, space)
        profile = decay_profile(state.weights, x, times, space)
        bad = None
        checked = []
        for k, n_k, value in profile:
            rows.append((k, n_k, space.name, value_text(value)))
            # the 2^-k bound is claimed once s_{2k+1} exceeds the support
            if state.s(2 * k + 1) > top:
                checked.append(k)
                if not _leq_scaled(value, base.mul_pow2(-k) if isinstance(base, ScaledRational)
                                   else _scaled_float_shift(base, -k), space):
                    bad = bad or {"k": k, "n_k": n_k, "value": value}
        if bad:
            v = Verdict(Status.FAILS_WITH_WITNESS, horizon=max(times.values()), witness=bad,
                        narrative=f"||S^n_k x|| exceeds 2^-k ||x|| at k={bad['k']}")
        else:
            v = Verdict(Status.HOLDS_EXACTLY if space.exact else Status.HOLDS_WITH_BOUND,
                        horizon=max(times.values()), witness={"checked_k": checked},
                        narrative=f"||S^n_k x|| <= 2^-k ||x|| for k in {checked}")
        results.append({
            "check": "decay",
            "norm": space.name,
            "input_norm": value_text(base),
            "profile": [{"k": str(k), "n_k": str(n), "value": value_text(val)} for k, n, val in profile],
            **v.to_dict(),
        })
    report = {"command": "shift", "depth": str(depth), "vector": x.to_json(), "results": results}
    return report, _csv_text(("k", "n_k", "norm_kind", "value"), rows)


def _scaled_float_shift(value, k: int):
    return ScaledFloat(value.mant, value.exp + k, value.rel_err)


def _leq_scaled(a, b, space: SpaceNorm) -> bool:
    return leq_rel(a, b, 0.0 if space.exact else REL_TOL)


_DEFAULT_REGIONS = {
    "tent": {"U": Interval(Fraction(3, 10), Fraction(2, 5)), "V": Interval(Fraction(0), Fraction(1, 10))},
    "doubling": {"U": Arc(Fraction(0), Fraction(1, 8)), "V": Arc(Fraction(1, 3), Fraction(1, 100))},
    "shift": {"U": Cylinder("0110"), "V": Cylinder("11")},
}


def _systems_from_args(args):
    if not args.input:
        return [Tent(), Doubling(), Shift(), RotationSystem()], {}
    obj = _read_json(args.input)
    regions = {}
    if isinstance(obj, dict) and isinstance(obj.get("regions"), dict):
        regions = {key: region_from_json(val) for key, val in obj["regions"].items()}
    return [system_from_json(obj)], regions


def cmd_systems(args) -> tuple[dict, str]:
    systems, regions = _systems_from_args(args)
    results, rows = [], []
    for system in systems:
        tag = system_to_json(system)
        if isinstance(system, RotationSystem):
            horizon = args.horizon if args.horizon is not None else min(system.period - 1, 900)
            a = regions["U"].center if "U" in regions else Fraction(0)
            v = no_consecutive_returns(system, a, horizon)
            results.append({"system": tag, **_entry("no_consecutive_returns", v)})
            delta = Fraction(1, 100)
            cover = strong_transitivity_cover(system, a, delta, [Fraction(j, 64) for j in range(64)], horizon)
            results.append({"system": tag, **_entry("strong_transitivity_cover", cover)})
            u, sep = separation_region(system, a, horizon)
            results.append({"system": tag, **_entry("separation", sep, region=u.to_json())})
            ball = regions.get("U") or CircleBall(a, v.witness["radius"])
            target = regions.get("V") or ball
        else:
            horizon = args.horizon if args.horizon is not None else 64
            ball = regions.get("U") or _DEFAULT_REGIONS[system.name]["U"]
            target = regions.get("V") or _DEFAULT_REGIONS[system.name]["V"]
            v = covering_time(system, ball, max_j=max(horizon, 1))
            results.append({"system": tag, **_entry("covering_time", v, region=ball.to_json())})
        hits = set(return_set(system, ball, target, horizon))
        results.append({
            "system": tag,
            "check": "return_set",
            "status": Status.HOLDS_UP_TO_HORIZON.value,
            "horizon": str(horizon),
            "witness": {"U": ball.to_json(), "V": target.to_json(),
                        "returns": [str(n) for n in sorted(hits)]},
            "narrative": f"{len(hits)} return times in [0, {horizon}]",
            "flags": [],
        })
        rows.extend((system.name, n, int(n in hits)) for n in range(horizon + 1))
    report = {"command": "systems", "results": results}
    return report, _csv_text(("system", "n", "hit"), rows)


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "shift": cmd_shift,
    "systems": cmd_systems,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, csv_text = COMMANDS[args.command](args)
        _emit(args, report, csv_text)
    except (ConfigError, ShiftlabError, ValueError, OSError) as exc:
        print(f"shiftlab {args.command}: {exc}", file=sys.stderr)
        return 2
    return 1 if _failed(report) else 0


def main() -> None:
    sys.exit(run())


__all__ = ["build_parser", "main", "parse_k_range", "parse_tol", "report_schema", "run"]
