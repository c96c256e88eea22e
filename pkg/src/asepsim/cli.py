"""Command-line front door: experiment dispatch and bit-stable file output.

Three subcommands:

* ``simulate`` runs the current-fluctuation ensemble and writes
  ``currents.csv`` plus ``summary.json``.
* ``f2`` tabulates the Tracy-Widom distribution and the current limit law
  onto ``f2.csv``.
* ``verify`` bundles the certification suites (exact-oracle chi-square,
  strong law, pathwise event identity) and writes ``verify.json``; a failed
  suite makes the process exit with status 2.

All numeric output is decimal text with 17 significant digits, so repeated
runs with the same seed are byte-identical whatever the worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import ModelParameters, truncation_size
from .harness import (
    EnsembleConfig,
    certify_against_oracle,
    count_identity_holds,
    run_ensemble,
    verify_event_identity,
    _final_positions,
    _strong_law_stats,
)
from .scaling import scaling_constants
from .tw2 import distribution_table

__all__ = ["RunConfig", "UsageError", "emit_outputs", "main", "parse_config"]


class UsageError(ValueError):
    """Command line rejected; the message names the violated constraint."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    p: float = 0.25
    q: float = 0.75
    v: float = 0.0
    t: float = 200.0
    trajectories: int = 2000
    seed: int = 1
    s_grid: tuple[float, ...] = field(default=())
    order: int = 60
    workers: int = 1
    out_dir: str = "."
    fmt: str = "both"

    @property
    def params(self) -> ModelParameters:
        return ModelParameters(self.p, self.q)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


def _parse_grid(spec: str) -> tuple[float, ...]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"grid has a non-numeric field: {spec!r}") from exc
    if step <= 0.0:
        raise UsageError(f"grid step must be positive, got {step}")
    if stop < start:
        raise UsageError(f"grid stop {stop} is below start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(count))


def _build_parser() -> _Parser:
    parser = _Parser(prog="asepsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--p", type=float, default=0.25, help="right-jump probability")
        sp.add_argument("--q", type=float, default=0.75, help="left-jump probability")
        sp.add_argument("--v", type=float, default=0.0, help="scaled observation position")
        sp.add_argument("--time", type=float, default=200.0, dest="t",
                        help="time parameter of the scaling theory")
        sp.add_argument("--trajectories", type=int, default=2000)
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--s", type=str, default="-4:4:0.25", dest="s_grid",
                        help="fluctuation grid start:stop:step")
        sp.add_argument("--order", type=int, default=60, help="quadrature order for F2")
        sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--out-dir", type=str, default=".", dest="out_dir")
        sp.add_argument("--format", type=str, default="both", dest="fmt",
                        choices=("csv", "json", "both"))

    for name in ("simulate", "f2", "verify"):
        common(sub.add_parser(name))
    return parser


def _merge_grid_values(argv: list[str]) -> list[str]:
    # argparse reads "-4:4:0.25" as an option; fold it into "--s=..." so the
    # documented "--s -4:4:0.25" form works.
    out: list[str] = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--s" and i + 1 < len(argv) and ":" in argv[i + 1]:
            out.append(f"--s={argv[i + 1]}")
            skip = True
        else:
            out.append(tok)
    return out


def parse_config(argv: list[str]) -> RunConfig:
    """Validated RunConfig; raises UsageError naming any violated constraint."""
    ns = _build_parser().parse_args(_merge_grid_values(argv))
    if ns.p < 0.0 or ns.q < 0.0:
        raise UsageError(f"jump probabilities must be nonnegative, got p={ns.p}, q={ns.q}")
    if abs(ns.p + ns.q - 1.0) > 1e-12:
        raise UsageError(f"jump probabilities must satisfy p + q = 1, got p+q={ns.p + ns.q}")
    if not abs(ns.v) < 1.0:
        raise UsageError(f"scaled position must satisfy |v| < 1, got v={ns.v}")
    if ns.subcommand == "simulate" and ns.p >= ns.q:
        raise UsageError(
            f"limit-law run requires p < q (leftward drift), got p={ns.p}, q={ns.q}"
        )
    if ns.trajectories < 1:
        raise UsageError(f"trajectory count must be at least 1, got {ns.trajectories}")
    if ns.order < 10:
        raise UsageError(f"quadrature order must be at least 10, got {ns.order}")
    if ns.workers < 1:
        raise UsageError(f"worker count must be at least 1, got {ns.workers}")
    if ns.t < 0.0:
        raise UsageError(f"time parameter must be nonnegative, got {ns.t}")
    grid = _parse_grid(ns.s_grid)
    return RunConfig(
        subcommand=ns.subcommand,
        p=ns.p,
        q=ns.q,
        v=ns.v,
        t=ns.t,
        trajectories=ns.trajectories,
        seed=ns.seed,
        s_grid=grid,
        order=ns.order,
        workers=ns.workers,
        out_dir=ns.out_dir,
        fmt=ns.fmt,
    )


def _fmt(x: float) -> str:
    """Fixed 17-significant-digit decimal text."""
    return f"{x:.16e}"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="ascii")
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc}") from exc


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit_outputs(result, config: RunConfig) -> list[Path]:
    """Write the result of a simulate or f2 run; returns the paths written."""
    out_dir = Path(config.out_dir)
    written: list[Path] = []
    if config.subcommand == "simulate":
        if config.fmt in ("csv", "both"):
            lines = ["trajectory_id,current,s_normalized"]
            for i, (cur, s_val) in enumerate(zip(result.currents, result.normalized)):
                lines.append(f"{i},{int(cur)},{_fmt(float(s_val))}")
            path = out_dir / "currents.csv"
            _write(path, "\n".join(lines) + "\n")
            written.append(path)
        if config.fmt in ("json", "both"):
            summary = {
                "params": {"p": config.p, "q": config.q},
                "v": config.v,
                "t": config.t,
                "gamma": config.q - config.p,
                "N_truncation": result.truncation,
                "M": config.trajectories,
                "seed": config.seed,
                "ks_distance": result.ks_distance,
                "moments": result.moments,
                "version": __version__,
            }
            path = out_dir / "summary.json"
            _write(path, _json_text(summary))
            written.append(path)
        return written
    if config.subcommand == "f2":
        lines = ["s,F2,limit_law"]
        for s_val, f2_val, law in zip(result.s_values, result.f2, result.limit_law):
            lines.append(f"{_fmt(float(s_val))},{_fmt(float(f2_val))},{_fmt(float(law))}")
        path = out_dir / "f2.csv"
        _write(path, "\n".join(lines) + "\n")
        written.append(path)
        return written
    raise ValueError(f"emit_outputs cannot handle subcommand {config.subcommand!r}")


def _run_simulate(config: RunConfig) -> int:
    summary = run_ensemble(
        EnsembleConfig(
            params=config.params,
            v=config.v,
            t=config.t,
            trajectories=config.trajectories,
            seed=config.seed,
            s_grid=config.s_grid,
            workers=config.workers,
        )
    )
    paths = emit_outputs(summary, config)
    print(
        f"simulate: M={config.trajectories} t={config.t} site={summary.site} "
        f"N={summary.truncation} ks={summary.ks_distance:.4f} "
        f"({summary.wall_seconds:.1f}s)"
    )
    for path in paths:
        print(f"  wrote {path}")
    return 0


def _run_f2(config: RunConfig) -> int:
    table = distribution_table(np.asarray(config.s_grid), config.order)
    paths = emit_outputs(table, config)
    print(f"f2: {len(config.s_grid)} grid points at order {config.order}")
    for path in paths:
        print(f"  wrote {path}")
    return 0


# Verification-suite gates.  The strong-law gate allows, on top of three
# Monte Carlo standard errors, the known t^{1/3} correction to the mean
# current: E current/t = limit + E[S] a2 (gamma t)^{1/3} / t + o(t^{-2/3})
# with E[S] = 1.771, padded by a factor 1.4; at the characteristic edge
# (c = gamma) the mean current is O(sqrt(t)) particles, budgeted as 5/t.
_STRONG_LAW_T = 500.0
_STRONG_LAW_M = 200
_MEAN_S = 1.7710868074
_EDGE_BUDGET = 5.0


def _run_verify(config: RunConfig) -> int:
    params = config.params
    gamma = params.gamma
    if gamma <= 0.0:
        raise UsageError(f"verification requires p < q, got p={config.p}, q={config.q}")
    suites: dict[str, dict] = {}

    cert = certify_against_oracle(
        params,
        n_particles=3,
        window=(-10, 13),
        t_phys=0.5,
        trajectories=max(config.trajectories, 2000),
        seed=config.seed,
        workers=config.workers,
    )
    suites["oracle_chi_square"] = {
        "chi2": cert.chi2,
        "dof": cert.dof,
        "critical_at_0.01": cert.critical,
        "boundary_certificate": cert.certificate,
        "escaped": cert.escaped,
        "trajectories": cert.trajectories,
        "passed": bool(cert.passed and cert.certificate <= 1e-8),
    }

    sl_cfg = EnsembleConfig(
        params=params,
        t=_STRONG_LAW_T,
        trajectories=_STRONG_LAW_M,
        seed=config.seed,
        workers=config.workers,
    )
    _, a2 = scaling_constants(0.0)
    stats0 = _strong_law_stats(sl_cfg, 0.0)
    allowance0 = 1.4 * _MEAN_S * a2 * (gamma * _STRONG_LAW_T) ** (1.0 / 3.0) / _STRONG_LAW_T
    stats_edge = _strong_law_stats(sl_cfg, gamma)
    allowance_edge = _EDGE_BUDGET / _STRONG_LAW_T
    ok0 = stats0["deviation"] <= 3.0 * stats0["std_error"] + allowance0
    ok_edge = stats_edge["deviation"] <= 3.0 * stats_edge["std_error"] + allowance_edge
    suites["strong_law"] = {
        "bulk": {**stats0, "allowance": allowance0, "passed": bool(ok0)},
        "edge": {**stats_edge, "allowance": allowance_edge, "passed": bool(ok_edge)},
        "passed": bool(ok0 and ok_edge),
    }

    t_ident = 50.0
    n_ident = truncation_size(t_ident, 0)
    positions = _final_positions(
        params, n_ident, t_ident, config.trajectories, config.seed, config.workers
    )
    identity_ok = all(verify_event_identity(row, 0) for row in positions)
    count_ok = count_identity_holds(positions, 0)
    suites["event_identity"] = {
        "trajectories": config.trajectories,
        "pathwise_passed": bool(identity_ok),
        "count_identity_passed": bool(count_ok),
        "passed": bool(identity_ok and count_ok),
    }

    passed = all(s["passed"] for s in suites.values())
    report = {
        "params": {"p": config.p, "q": config.q},
        "seed": config.seed,
        "suites": suites,
        "passed": passed,
        "version": __version__,
    }
    path = Path(config.out_dir) / "verify.json"
    _write(path, _json_text(report))
    for name, suite in suites.items():
        print(f"verify[{name}]: {'PASS' if suite['passed'] else 'FAIL'}")
    print(f"  wrote {path}")
    return 0 if passed else 2


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        config = parse_config(list(argv))
        if config.subcommand == "simulate":
            return _run_simulate(config)
        if config.subcommand == "f2":
            return _run_f2(config)
        return _run_verify(config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
