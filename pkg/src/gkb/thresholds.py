"""Security thresholds in the thermal noise and parameter sweeps over channel families."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import coherent_info, delta_of_gamma, lower_bound, upper_bound
from .channels import CHANNELS, ThermalAmp, ThermalLoss, make_channel
from .errors import DomainError, NonMonotoneError
from .optimize import Bracket, OptimizerOptions, bisect_sign
from .symplectic import thermal_entropy

FAMILIES = {"loss_vs_eta": (ThermalLoss, "eta"), "amp_vs_g": (ThermalAmp, "g")}

FAMILY_ALIASES = {
    "loss": "thermal_loss",
    "amp": "thermal_amp",
    "noise": "added_noise",
    "thermal_loss": "thermal_loss",
    "thermal_amp": "thermal_amp",
    "added_noise": "added_noise",
}


@dataclass(frozen=True)
class ThresholdQuery:
    family: str
    scan_param: float
    omega_bracket: tuple = (1.0, 200.0)
    tol: float = 1e-6

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError("family", f"expected one of {sorted(FAMILIES)}, got {self.family!r}")
        lo, hi = self.omega_bracket
        if not 1.0 <= lo < hi:
            raise DomainError("omega_bracket", f"need 1 <= low < high, got {self.omega_bracket}")
        self.channel(lo)  # validates scan_param

    def channel(self, omega: float):
        cls, name = FAMILIES[self.family]
        return cls(**{name: self.scan_param, "omega": omega})


@dataclass(frozen=True)
class Threshold:
    omega: float
    bracket: Bracket | None
    diagnostics: tuple = ()

    def __float__(self):
        return self.omega


def security_threshold(q: ThresholdQuery, opts: OptimizerOptions | None = None) -> Threshold:
    """Largest thermal noise ``omega`` at which the optimized lower bound stays positive.

    A five-point geometric sign scan over the bracket must show a single
    sign change before bisection starts; more than one raises
    :class:`NonMonotoneError`.
    """
    opts = opts or OptimizerOptions()

    def rate(omega):
        return lower_bound(q.channel(omega), opts).lower_bound

    lo, hi = q.omega_bracket
    scan = np.geomspace(lo, hi, 5)
    values = [rate(w) for w in scan]
    if not values[0] > 0:
        return Threshold(lo, None, ("no security at the lower end of the bracket",))
    positive = [v > 0 for v in values]
    changes = sum(a != b for a, b in zip(positive, positive[1:]))
    if changes > 1:
        raise NonMonotoneError(f"lower bound changes sign {changes} times on {list(scan)}")
    if changes == 0:
        return Threshold(hi, None, (f"threshold beyond omega={hi:g}",))
    k = positive.index(False)
    br = bisect_sign(rate, float(scan[k - 1]), float(scan[k]), q.tol, values[k - 1], values[k])
    return Threshold(br.mid, br)


def threshold_of_info(family: str, scan_param: float, tol: float = 1e-12) -> float:
    """Noise ``omega`` at which the (reverse) coherent information reaches zero."""
    if family == "loss_vs_eta":
        target = coherent_info(ThermalLoss(scan_param, 1.0))[0]
    elif family == "amp_vs_g":
        target = coherent_info(ThermalAmp(scan_param, 1.0))[0]
    else:
        raise DomainError("family", f"expected one of {sorted(FAMILIES)}, got {family!r}")
    # the info term is target - h(omega) and h is increasing from h(1) = 0
    hi = 2.0
    while thermal_entropy(hi) < target:
        hi *= 2.0
    br = bisect_sign(lambda w: target - thermal_entropy(w), 1.0, hi, tol, target, None)
    return br.mid


# -- sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    points: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.points < 2:
            raise DomainError(self.name, f"an axis needs at least 2 points, got {self.points}")
        if not self.min < self.max:
            raise DomainError(self.name, f"axis needs min < max, got {self.min}, {self.max}")
        if self.spacing not in ("linear", "log"):
            raise DomainError(self.name, f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and self.min <= 0:
            raise DomainError(self.name, "log spacing needs a positive minimum")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            out = np.geomspace(self.min, self.max, self.points)
        else:
            out = np.linspace(self.min, self.max, self.points)
        out[0], out[-1] = self.min, self.max
        return out


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid over channel parameters and, optionally, a fixed ``gamma`` axis.

    When ``gamma`` is one of the axes, rows report ``delta`` at that
    measurement instead of the optimized bound.
    """

    family: str
    axes: tuple
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        family = FAMILY_ALIASES.get(self.family)
        if family is None:
            raise DomainError("family", f"unknown channel family {self.family!r}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "axes", tuple(self.axes))
        allowed = set(CHANNELS[family].param_names) | {"gamma"}
        names = [a.name for a in self.axes] + list(self.fixed)
        for name in names:
            if name not in allowed:
                raise DomainError(name, f"not a parameter of {family}")
        if len(set(names)) != len(names):
            raise DomainError("axes", "a parameter is given more than once")
        missing = set(CHANNELS[family].param_names) - set(names)
        if missing:
            raise DomainError(sorted(missing)[0], "parameter has neither an axis nor a fixed value")

    def points(self):
        values = [a.values() for a in self.axes]
        for combo in itertools.product(*values):
            point = dict(self.fixed)
            point.update({a.name: float(v) for a, v in zip(self.axes, combo)})
            yield point


SWEEP_COLUMNS = (
    "channel",
    "param1_name",
    "param1",
    "param2_name",
    "param2",
    "gamma_star",
    "delta_g",
    "info_term",
    "lower_bound",
    "upper_bound",
    "direction",
    "diag",
)


@dataclass(frozen=True)
class SweepRow:
    channel: str
    param1_name: str
    param1: float
    param2_name: str
    param2: float
    gamma_star: float
    delta_g: float
    info_term: float
    lower_bound: float
    upper_bound: float
    direction: str
    diag: str

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in SWEEP_COLUMNS}


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SweepTable:
    rows: tuple

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def to_csv(self, stream=None) -> str | None:
        buf = io.StringIO() if stream is None else stream
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in self.rows:
            writer.writerow([_fmt(getattr(row, c)) for c in SWEEP_COLUMNS])
        return buf.getvalue() if stream is None else None

    def records(self) -> list[dict]:
        out = []
        for row in self.rows:
            rec = row.as_dict()
            for k, v in rec.items():
                if isinstance(v, float) and not math.isfinite(v):
                    rec[k] = None
            out.append(rec)
        return out

    def to_json(self, manifest: dict | None = None) -> str:
        payload = {"rows": self.records()}
        if manifest is not None:
            payload["manifest"] = manifest
        # key order follows the CSV columns
        return json.dumps(payload, indent=2)


def _param_columns(spec_cls, point):
    names = list(spec_cls.param_names) + ["", ""]
    return (
        names[0],
        point.get(names[0], math.nan),
        names[1],
        point.get(names[1], math.nan) if names[1] else math.nan,
    )


def _evaluate_row(family: str, point: dict, opts: OptimizerOptions) -> SweepRow:
    cls = CHANNELS[family]
    p1n, p1, p2n, p2 = _param_columns(cls, point)
    try:
        spec = make_channel(family, **{k: v for k, v in point.items() if k != "gamma"})
        info, direction = coherent_info(spec)
        ub = upper_bound(spec)
        if "gamma" in point:
            gamma = point["gamma"]
            d = float(delta_of_gamma(spec, gamma))
            return SweepRow(family, p1n, p1, p2n, p2, gamma, d, info, info + d, ub, direction.value, "fixed_gamma")
        res = lower_bound(spec, opts)
        return SweepRow(
            family, p1n, p1, p2n, p2, res.gamma_star, res.delta_g, res.info_term,
            res.lower_bound, res.upper_bound, res.direction.value, "|".join(res.diagnostics),
        )
    except (ArithmeticError, ValueError) as exc:
        nan = math.nan
        return SweepRow(family, p1n, p1, p2n, p2, nan, nan, nan, nan, nan, "", f"error: {exc}")


def default_workers() -> int:
    try:
        n = int(os.environ.get("GKB_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def run_sweep(grid: SweepGrid, opts: OptimizerOptions | None = None, workers: int | None = None) -> SweepTable:
    """Evaluate every grid point in row-major order.

    Failures are recorded in the row's ``diag`` column and never abort the
    sweep.  Row order does not depend on ``workers``.
    """
    opts = opts or OptimizerOptions()
    points = list(grid.points())
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or len(points) < 2:
        rows = [_evaluate_row(grid.family, p, opts) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda p: _evaluate_row(grid.family, p, opts), points))
    return SweepTable(tuple(rows))


def threshold_scan(
    family: str,
    scan_values: Sequence[float],
    bracket: tuple = (1.0, 200.0),
    tol: float = 1e-6,
    opts: OptimizerOptions | None = None,
):
    """Thresholds of the optimized bound and of the coherent information over a scan."""
    rows = []
    for x in scan_values:
        th = security_threshold(ThresholdQuery(family, float(x), bracket, tol), opts)
        rows.append((float(x), th.omega, threshold_of_info(family, float(x)), "|".join(th.diagnostics)))
    return rows


__all__ = [
    "Axis",
    "SweepGrid",
    "SweepRow",
    "SweepTable",
    "Threshold",
    "ThresholdQuery",
    "run_sweep",
    "security_threshold",
    "threshold_of_info",
    "threshold_scan",
]
