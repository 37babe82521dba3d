"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 I/O error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds import lower_bound
from .channels import AddedNoise, ThermalAmp, ThermalLoss
from .errors import DomainError
from .optimize import OptimizerOptions
from .thresholds import FAMILIES, Axis, SweepGrid, run_sweep, threshold_scan
from .verify import run_checks

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3, 4

THRESHOLD_FAMILIES = {"loss": "loss_vs_eta", "amp": "amp_vs_g", "loss_vs_eta": "loss_vs_eta", "amp_vs_g": "amp_vs_g"}
THRESHOLD_COLUMNS = ("scan_param", "omega_th_lower_bound", "omega_th_info_term", "diag")

MANIFEST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "parameters", "version", "timestamp", "diagnostics"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "array", "items": {"type": "string"}},
        "parameters": {"type": "object"},
        "version": {"type": "string"},
        "timestamp": {"type": "string"},
        "diagnostics": {
            "type": "object",
            "required": ["rows", "rows_with_diagnostics", "errors", "messages"],
            "additionalProperties": False,
            "properties": {
                "rows": {"type": "integer", "minimum": 0},
                "rows_with_diagnostics": {"type": "integer", "minimum": 0},
                "errors": {"type": "integer", "minimum": 0},
                "messages": {"type": "object", "additionalProperties": {"type": "integer"}},
            },
        },
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for domain errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def timestamp() -> str:
    """UTC ISO-8601 time, or ``SOURCE_DATE_EPOCH`` when set (reproducible builds)."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        try:
            t = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
        except ValueError as exc:
            raise UsageError(f"SOURCE_DATE_EPOCH must be an integer, got {epoch!r}") from exc
    else:
        t = _dt.datetime.now(tz=_dt.timezone.utc)
    return t.replace(microsecond=0).isoformat()


def summarize_diagnostics(diags) -> dict:
    diags = list(diags)
    nonempty = [d for d in diags if d]
    messages = Counter(m for d in nonempty for m in d.split("|"))
    return {
        "rows": len(diags),
        "rows_with_diagnostics": len(nonempty),
        "errors": sum(d.startswith("error:") for d in nonempty),
        "messages": dict(sorted(messages.items())),
    }


@dataclass
class RunManifest:
    command: list
    parameters: dict
    diagnostics: dict
    version: str = __version__
    timestamp: str = field(default_factory=timestamp)

    def to_dict(self) -> dict:
        return {
            "command": list(self.command),
            "parameters": self.parameters,
            "version": self.version,
            "timestamp": self.timestamp,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, d: dict) -> RunManifest:
        return cls(d["command"], d["parameters"], d["diagnostics"], d["version"], d["timestamp"])


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def manifest_path(out: str) -> str:
    return out + ".manifest.json"


def _write_with_manifest(out: str, text: str, manifest: RunManifest):
    _write_text(out, text)
    _write_text(manifest_path(out), json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")


# -- argument types ----------------------------------------------------------


def parse_axis(text: str) -> tuple:
    """``NAME:MIN:MAX:POINTS[:linear|log]``."""
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise argparse.ArgumentTypeError(f"expected NAME:MIN:MAX:POINTS[:SPACING], got {text!r}")
    try:
        lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number in axis {text!r}") from exc
    spacing = parts[4] if len(parts) == 5 else "linear"
    if spacing not in ("linear", "log"):
        raise argparse.ArgumentTypeError(f"spacing must be linear or log, got {spacing!r}")
    # range checks are domain errors, reported after parsing
    return (parts[0], lo, hi, n, spacing)


def parse_fixed(text: str):
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number in {text!r}") from exc


def parse_scan(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX:N, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number in scan {text!r}") from exc


def _add_optimizer_flags(p):
    d = OptimizerOptions()
    p.add_argument("--gamma-max", type=float, default=d.gamma_max, help="upper end of the gamma search window")
    p.add_argument("--coarse-points", type=int, default=d.coarse_points, help="log-spaced coarse scan size")
    p.add_argument("--refine-tol", type=float, default=d.refine_tol, help="golden-section bracket tolerance")


def _optimizer(args) -> OptimizerOptions:
    return OptimizerOptions(gamma_max=args.gamma_max, coarse_points=args.coarse_points, refine_tol=args.refine_tol)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gkb", description="Gaussian-measurement key-rate bounds for bosonic channels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="evaluate the bound at a single channel")
    ch = p.add_mutually_exclusive_group(required=True)
    ch.add_argument("--thermal-loss", dest="channel", action="store_const", const="thermal_loss")
    ch.add_argument("--thermal-amp", dest="channel", action="store_const", const="thermal_amp")
    ch.add_argument("--added-noise", dest="channel", action="store_const", const="added_noise")
    p.add_argument("--eta", type=float, help="transmissivity (thermal loss)")
    p.add_argument("--g", type=float, help="gain (thermal amplifier)")
    p.add_argument("--zeta", type=float, help="added noise variance")
    noise = p.add_mutually_exclusive_group()
    noise.add_argument("--omega", type=float, help="environment thermal variance (1 = vacuum)")
    noise.add_argument("--nbar", type=float, help="environment mean photon number, omega = 2 nbar + 1")
    _add_optimizer_flags(p)
    p.add_argument("--json", metavar="PATH", help="also write the result and a run manifest as JSON")

    p = sub.add_parser("sweep", help="evaluate the bound on a parameter grid")
    p.add_argument("--family", required=True, help="loss, amp or noise")
    p.add_argument("--axis", action="append", type=parse_axis, default=[], metavar="NAME:MIN:MAX:POINTS[:SPACING]")
    p.add_argument("--fixed", action="append", type=parse_fixed, default=[], metavar="NAME=VALUE")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=None, help="worker threads (default: GKB_THREADS or CPU count)")
    _add_optimizer_flags(p)

    p = sub.add_parser("threshold", help="security thresholds in omega over a scan of eta or g")
    p.add_argument("--family", required=True, choices=sorted(THRESHOLD_FAMILIES))
    p.add_argument("--scan", required=True, type=parse_scan, metavar="MIN:MAX:N")
    p.add_argument("--omega-max", type=float, default=200.0, help="upper end of the omega bracket")
    p.add_argument("--tol", type=float, default=1e-6, help="bisection tolerance in omega")
    p.add_argument("--out", help="also write the rows as CSV")
    _add_optimizer_flags(p)

    p = sub.add_parser("verify", help="run the self-consistency checks")
    p.add_argument("--mu", type=float, default=1e6, help="input variance for the finite-mu oracle")
    p.add_argument("--tolerance", type=float, default=1e-4, help="oracle agreement tolerance in bits")
    return parser


# -- commands ----------------------------------------------------------------

_CHANNEL_PARAMS = {"thermal_loss": ("eta",), "thermal_amp": ("g",), "added_noise": ("zeta",)}


def _bound_channel(args):
    own = _CHANNEL_PARAMS[args.channel]
    for name in ("eta", "g", "zeta"):
        given = getattr(args, name) is not None
        if name in own and not given:
            raise UsageError(f"--{args.channel.replace('_', '-')} needs --{name}")
        if name not in own and given:
            raise UsageError(f"--{name} does not apply to {args.channel}")
    if args.channel == "added_noise":
        if args.omega is not None or args.nbar is not None:
            raise UsageError("--omega/--nbar do not apply to added_noise")
        return AddedNoise(args.zeta)
    omega = 1.0
    if args.nbar is not None:
        if not args.nbar >= 0:
            raise DomainError("nbar", f"must be >= 0, got {args.nbar}")
        omega = 2.0 * args.nbar + 1.0
    elif args.omega is not None:
        omega = args.omega
    if args.channel == "thermal_loss":
        return ThermalLoss(args.eta, omega)
    return ThermalAmp(args.g, omega)


def cmd_bound(args, argv) -> int:
    spec = _bound_channel(args)
    opts = _optimizer(args)
    res = lower_bound(spec, opts)
    info_name = "I_RC" if res.direction.value == "reverse" else "I_C"
    named = dict(zip(spec.param_names, spec.params))
    params = ", ".join(f"{k}={v:g}" for k, v in named.items())
    lines = [
        f"channel: {spec.name}({params})",
        f"direction: {res.direction.value}",
        f"{info_name}: {res.info_term:.12g}",
        f"Delta_G: {res.delta_g:.12g}",
        f"L_G: {res.lower_bound:.12g}",
        f"U: {res.upper_bound:.12g}",
        f"gamma_star: {res.gamma_star:.12g}",
    ]
    lines += [f"diagnostic: {d}" for d in res.diagnostics]
    print("\n".join(lines))
    if args.json:
        record = {
            "channel": spec.name,
            "params": named,
            "direction": res.direction.value,
            "info_term": res.info_term,
            "delta_g": res.delta_g,
            "lower_bound": res.lower_bound,
            "upper_bound": res.upper_bound,
            "gamma_star": res.gamma_star,
            "diag": "|".join(res.diagnostics),
        }
        manifest = RunManifest(argv, {"channel": spec.name, **named, "optimizer": vars(opts)}, summarize_diagnostics([record["diag"]]))
        payload = {"result": {k: _clean(v) for k, v in record.items()}, "manifest": manifest.to_dict()}
        _write_text(args.json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_sweep(args, argv) -> int:
    axes = [Axis(*a) for a in args.axis]
    grid = SweepGrid(args.family, axes, dict(args.fixed))
    opts = _optimizer(args)
    table = run_sweep(grid, opts, args.workers)
    parameters = {
        "family": grid.family,
        "axes": [vars(a) for a in axes],
        "fixed": dict(args.fixed),
        "optimizer": vars(opts),
        "format": args.format,
    }
    manifest = RunManifest(argv, parameters, summarize_diagnostics(r.diag for r in table.rows))
    if args.format == "csv":
        text = table.to_csv()
        if args.out:
            _write_with_manifest(args.out, text, manifest)
        else:
            sys.stdout.write(text)
    else:
        text = table.to_json(manifest.to_dict()) + "\n"
        if args.out:
            _write_text(args.out, text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def monotonicity(values) -> str:
    vals = [v for v in values if math.isfinite(v)]
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    if all(d > 0 for d in diffs):
        return "increasing"
    if all(d < 0 for d in diffs):
        return "decreasing"
    return "non-monotone"


def cmd_threshold(args, argv) -> int:
    family = THRESHOLD_FAMILIES[args.family]
    lo, hi, n = args.scan
    if n < 1:
        raise DomainError("scan", f"needs at least one point, got {n}")
    scan = np.linspace(lo, hi, n) if n > 1 else np.array([lo])
    opts = _optimizer(args)
    rows = threshold_scan(family, scan, (1.0, args.omega_max), args.tol, opts)
    param = FAMILIES[family][1]
    print(f"{param:>10} {'omega_th_lower_bound':>22} {'omega_th_info_term':>20}  diag")
    for x, w_lb, w_info, diag in rows:
        print(f"{x:>10.6g} {w_lb:>22.10g} {w_info:>20.10g}  {diag}")
    print(f"monotone omega_th_lower_bound: {monotonicity([r[1] for r in rows])}")
    print(f"monotone omega_th_info_term: {monotonicity([r[2] for r in rows])}")
    dominated = all(r[1] >= r[2] for r in rows)
    print(f"dominance omega_th_lower_bound >= omega_th_info_term: {'yes' if dominated else 'no'}")
    if args.out:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(THRESHOLD_COLUMNS)
        for x, w_lb, w_info, diag in rows:
            writer.writerow([format(x, ".17g"), format(w_lb, ".17g"), format(w_info, ".17g"), diag])
        parameters = {"family": family, "scan": [lo, hi, n], "omega_max": args.omega_max, "tol": args.tol, "optimizer": vars(opts)}
        _write_with_manifest(args.out, buf.getvalue(), RunManifest(argv, parameters, summarize_diagnostics(r[3] for r in rows)))
    return EXIT_OK


def cmd_verify(args, argv) -> int:
    if not args.mu >= 1.0:
        raise DomainError("mu", f"must be >= 1, got {args.mu}")
    if not args.tolerance > 0:
        raise DomainError("tolerance", f"must be positive, got {args.tolerance}")
    checks = run_checks(args.mu, args.tolerance)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.informational and not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed" if failed else "all checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {"bound": cmd_bound, "sweep": cmd_sweep, "threshold": cmd_threshold, "verify": cmd_verify}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, ["gkb", *argv])
    except UsageError as exc:
        print(f"gkb {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"gkb {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ArithmeticError as exc:
        # numerical breakdown is reported as a domain problem of the inputs
        print(f"gkb {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"gkb {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
