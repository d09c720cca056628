"""Command-line entry point: eval, sweep, figure, optimize and selftest."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

from . import selftest as selftest_mod
from .errors import MetrologyError
from .estimation import cramer_rao
from .explore import (
    AXIS_NAMES,
    FIG3_DELTAS,
    AxisSpec,
    SweepRecord,
    evaluate,
    figure_axes,
    figure_base,
    figure_data,
    maximize,
    sweep,
)
from .model import Acceleration, DirectNu, ModelParams, Physical, Temperature

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_SELFTEST = 3

VALUE_COLUMNS = ("qfi", "concurrence", "alpha", "beta", "gamma")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def parse_axis(text: str) -> AxisSpec:
    """NAME:START:STOP:POINTS[:log]"""
    parts = text.split(":")
    if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] not in ("log", "linear")):
        raise UsageError(f"--axis {text!r}: expected NAME:START:STOP:POINTS[:log]")
    name = parts[0]
    if name not in AXIS_NAMES:
        raise UsageError(f"--axis {text!r}: unknown axis {name!r}, expected one of {AXIS_NAMES}")
    try:
        start, stop, points = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise UsageError(f"--axis {text!r}: START, STOP must be numbers and POINTS an integer")
    scale = parts[4] if len(parts) == 5 else "linear"
    try:
        return AxisSpec(name, start, stop, points, scale)
    except MetrologyError as exc:
        raise UsageError(f"--axis {text!r}: {exc}")


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model parameters")
    g.add_argument("--theta", type=float, help="probe angle in [0, pi/2] (default pi/4)")
    g.add_argument("--omega", type=float, help="detector energy gap (default 1)")
    g.add_argument("--nu", type=float, help="effective coupling (default 0.1)")
    g.add_argument("--epsilon", type=float, help="coupling constant")
    g.add_argument("--delta", type=float, help="interaction time")
    g.add_argument("--kappa", type=float, help="detector smearing width")
    g.add_argument("--acceleration", type=float, help="proper acceleration a")
    g.add_argument("--temperature", type=float, help="Unruh temperature T (default 1)")


def _add_output_flags(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--output", help="write to this path instead of stdout")
    p.add_argument("--workers", type=int, default=1,
                   help="threads used for grid evaluation; never changes the output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unruh-metrology",
                     description="Quantum Fisher information for Unruh temperature estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate a single parameter point")
    _add_param_flags(p)
    _add_output_flags(p, "json")
    p.add_argument("--n-trials", type=int, help="also report the Cramer-Rao variance bound")

    p = sub.add_parser("sweep", help="evaluate a one- or two-axis grid")
    _add_param_flags(p)
    _add_output_flags(p, "csv")
    p.add_argument("--axis", action="append", default=[], help="NAME:START:STOP:POINTS[:log]")

    p = sub.add_parser("figure", help="regenerate the data behind a figure")
    p.add_argument("which", choices=("fig1", "fig2", "fig3"))
    _add_param_flags(p)
    _add_output_flags(p, "csv")
    p.add_argument("--axis", action="append", default=[], help="replace the preset grid")
    p.add_argument("--delta-set", help="comma-separated interaction times for fig3")

    p = sub.add_parser("optimize", help="maximise the QFI along one axis")
    _add_param_flags(p)
    _add_output_flags(p, "json")
    p.add_argument("--axis", action="append", default=[], help="NAME:START:STOP:POINTS[:log]")

    sub.add_parser("selftest", help="run the cross-route consistency checks")
    return parser


def resolve_params(ns) -> ModelParams:
    """Build ModelParams from flags; conflicting or partial flag groups are usage errors."""
    physical = [ns.epsilon, ns.delta, ns.kappa]
    if ns.nu is not None and any(v is not None for v in physical):
        raise UsageError("--nu cannot be combined with --epsilon/--delta/--kappa")
    if any(v is not None for v in physical) and not all(v is not None for v in physical):
        raise UsageError("--epsilon, --delta and --kappa must be given together")
    if ns.acceleration is not None and ns.temperature is not None:
        raise UsageError("--acceleration and --temperature are mutually exclusive")
    theta = math.pi / 4 if ns.theta is None else ns.theta
    omega = 1.0 if ns.omega is None else ns.omega
    if all(v is not None for v in physical):
        coupling = Physical(*physical)
    else:
        coupling = DirectNu(0.1 if ns.nu is None else ns.nu)
    if ns.acceleration is not None:
        kin = Acceleration(ns.acceleration)
    else:
        kin = Temperature(1.0 if ns.temperature is None else ns.temperature)
    return ModelParams(theta, omega, coupling, kin)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _json_number(x):
    return None if x is None or not math.isfinite(x) else x


def record_dict(rec: SweepRecord) -> dict:
    out = dict(rec.coordinates)
    c = rec.coefficients
    out["qfi"] = _json_number(rec.qfi)
    out["concurrence"] = _json_number(rec.concurrence)
    out["alpha"] = None if c is None else c.alpha
    out["beta"] = None if c is None else c.beta
    out["gamma"] = None if c is None else c.gamma
    out["flags"] = sorted(rec.validity_flags)
    return out


def render_csv(records: Sequence[SweepRecord], axis_names: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*axis_names, *VALUE_COLUMNS, "flags"])
    for rec in records:
        c = rec.coefficients
        coeffs = (math.nan,) * 3 if c is None else tuple(c)
        row = [_fmt(rec.coordinates[n]) for n in axis_names]
        row += [_fmt(v) for v in (rec.qfi, rec.concurrence, *coeffs)]
        row.append(";".join(sorted(rec.validity_flags)))
        writer.writerow(row)
    return buf.getvalue()


def render_json(meta: dict, records: list[dict]) -> str:
    return json.dumps({"meta": meta, "records": records}, indent=2) + "\n"


def _axis_meta(axes) -> list[dict]:
    return [{"name": a.name, "start": a.start, "stop": a.stop, "points": a.points,
             "scale": a.scale} for a in axes]


def _emit(text: str, output: Optional[str], stdout) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _parse_axes(raw, allowed_counts) -> list[AxisSpec]:
    axes = [parse_axis(t) for t in raw]
    if len(axes) not in allowed_counts:
        want = " or ".join(str(n) for n in allowed_counts)
        raise UsageError(f"expected {want} --axis flag(s), got {len(axes)}")
    return axes


def _cmd_eval(ns, stdout) -> int:
    params = resolve_params(ns)
    rec = evaluate(params)
    meta = {"command": "eval", "params": params.resolved()}
    if ns.format == "json":
        row = record_dict(rec)
        if ns.n_trials is not None:
            bound = cramer_rao(rec.qfi, ns.n_trials)
            row["n_trials"] = bound.n_trials
            row["variance_bound"] = _json_number(bound.variance_bound)
        _emit(render_json(meta, [row]), ns.output, stdout)
    else:
        _emit(render_csv([rec], []), ns.output, stdout)
    return EXIT_OK


def _cmd_sweep(ns, stdout) -> int:
    axes = _parse_axes(ns.axis, (1, 2))
    params = resolve_params(ns)
    records = sweep(params, axes, ns.workers)
    _write_records(ns, stdout, records, [a.name for a in axes],
                   {"command": "sweep", "params": params.resolved(), "axes": _axis_meta(axes)})
    return EXIT_OK


def _figure_overrides(ns) -> dict:
    if ns.epsilon is not None or ns.kappa is not None or ns.delta is not None:
        raise UsageError("figure presets fix epsilon, kappa and delta; use --delta-set for fig3")
    if ns.acceleration is not None and ns.temperature is not None:
        raise UsageError("--acceleration and --temperature are mutually exclusive")
    out = {}
    for flag, axis in (("theta", "theta"), ("omega", "omega"), ("nu", "nu"),
                       ("acceleration", "a"), ("temperature", "T")):
        value = getattr(ns, flag)
        if value is not None:
            out[axis] = value
    if ns.which == "fig3" and "nu" in out:
        raise UsageError("fig3 derives nu from the physical coupling; --nu is not allowed")
    return out


def _cmd_figure(ns, stdout) -> int:
    overrides = _figure_overrides(ns)
    axes = _parse_axes(ns.axis, (1, 2)) if ns.axis else figure_axes(ns.which)
    deltas = FIG3_DELTAS
    if ns.delta_set is not None:
        if ns.which != "fig3":
            raise UsageError("--delta-set only applies to fig3")
        try:
            deltas = tuple(float(v) for v in ns.delta_set.split(","))
        except ValueError:
            raise UsageError(f"--delta-set {ns.delta_set!r}: expected comma-separated numbers")
    records = figure_data(ns.which, overrides, axes=axes, deltas=deltas, workers=ns.workers)
    names = [a.name for a in axes]
    meta = {"command": "figure", "figure": ns.which, "overrides": overrides,
            "params": figure_base(ns.which).resolved(), "axes": _axis_meta(axes)}
    if ns.which == "fig3":
        names = ["delta", *names]
        meta["delta_set"] = list(deltas)
    _write_records(ns, stdout, records, names, meta)
    return EXIT_OK


def _write_records(ns, stdout, records, names, meta) -> None:
    if ns.format == "csv":
        _emit(render_csv(records, names), ns.output, stdout)
    else:
        _emit(render_json(meta, [record_dict(r) for r in records]), ns.output, stdout)


def _cmd_optimize(ns, stdout) -> int:
    (axis,) = _parse_axes(ns.axis, (1,))
    params = resolve_params(ns)
    rep = maximize(params, axis)
    row = {"axis": rep.axis, "argmax": rep.argmax, "max_qfi": rep.max_qfi,
           "bracket_lo": rep.bracket[0], "bracket_hi": rep.bracket[1],
           "refined": rep.refined, "flags": sorted(rep.flags)}
    if ns.format == "json":
        meta = {"command": "optimize", "params": params.resolved(), "axes": _axis_meta([axis])}
        _emit(render_json(meta, [row]), ns.output, stdout)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(row))
        writer.writerow([_fmt(v) if isinstance(v, float) else
                         (";".join(v) if isinstance(v, list) else v) for v in row.values()])
        _emit(buf.getvalue(), ns.output, stdout)
    return EXIT_OK


def _cmd_selftest(ns, stdout) -> int:
    checks = selftest_mod.run_checks()
    stdout.write(selftest_mod.report(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_SELFTEST


_COMMANDS = {
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "optimize": _cmd_optimize,
    "selftest": _cmd_selftest,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if getattr(ns, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        return _COMMANDS[ns.command](ns, stdout)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except MetrologyError as exc:
        stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_COMPUTATION


def main() -> None:
    sys.exit(run())
