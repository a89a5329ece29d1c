"""The full CLI suite, run as subprocesses so the determinism check sees fresh interpreters."""

from __future__ import annotations

import os
import subprocess
import sys
from pathlib import Path

SUITE = {
    "construct.json": ["construct", "--depth", "13"],
    "construct.csv": ["construct", "--depth", "11", "--format", "csv"],
    "verify.json": ["verify", "--depth", "13", "--seed", "7"],
    "verify-sampled.json": ["verify", "--depth", "13", "--k", "4..5", "--method", "sampled",
                            "--samples", "2000", "--seed", "7"],
    "verify.csv": ["verify", "--depth", "11", "--format", "csv", "--seed", "7"],
    "classify.json": ["classify", "--depth", "13", "--seed", "7"],
    "classify.csv": ["classify", "--depth", "11", "--format", "csv"],
    "shift.json": ["shift", "--depth", "13", "--norm", "l1", "--norm", "l2", "--norm", "sup"],
    "shift.csv": ["shift", "--depth", "12", "--format", "csv"],
    "systems.json": ["systems", "--seed", "7"],
    "systems.csv": ["systems", "--format", "csv"],
}


def run_cli(args: list[str], env: dict | None = None, cwd: str | Path | None = None) -> subprocess.CompletedProcess:
    full_env = dict(os.environ)
    full_env.update(env or {})
    return subprocess.run([sys.executable, "-m", "shiftlab", *args], capture_output=True,
                          text=True, env=full_env, cwd=cwd, check=False)


def run_suite(outdir: Path, hash_seed: str) -> dict[str, bytes]:
    outdir.mkdir(parents=True, exist_ok=True)
    reports = {}
    for name, args in SUITE.items():
        path = outdir / name
        proc = run_cli([*args, "--output", str(path)], env={"PYTHONHASHSEED": hash_seed})
        if proc.returncode != 0:
            raise RuntimeError(f"{name}: exit {proc.returncode}: {proc.stderr}")
        reports[name] = path.read_bytes()
    return reports
