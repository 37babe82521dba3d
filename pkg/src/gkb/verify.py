"""Self-checks run by ``gkb verify``.

Each check returns a :class:`Check`; ``informational`` checks are reported
but do not affect the exit status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import (
    Direction,
    coherent_info,
    delta_of_gamma,
    finite_mu_coherent_info,
    finite_mu_delta,
    natural_direction,
)
from .channels import (
    L_UC,
    AddedNoise,
    ThermalAmp,
    ThermalLoss,
    apply_channel,
    build_joint_state,
    cloner_symplectic,
    dilate_single_mode,
)
from .symplectic import MeasurementSpec, symplectic_form

GAMMAS = (1.0, 1.5, 2.5, 5.0, 10.0)

GRID = {
    "thermal_loss": [ThermalLoss(0.1, 1.0), ThermalLoss(0.3, 1.5), ThermalLoss(0.5, 2.0), ThermalLoss(0.7, 3.0), ThermalLoss(0.9, 5.0)],
    "thermal_amp": [ThermalAmp(1.1, 1.0), ThermalAmp(1.5, 1.5), ThermalAmp(2.0, 2.0), ThermalAmp(3.0, 3.0), ThermalAmp(5.0, 5.0)],
    "added_noise": [AddedNoise(z) for z in (0.05, 0.2, 0.38, 1.0, 4.0)],
}


def fmt_tol(x: float) -> str:
    """Compact scientific form, e.g. ``1e-4`` or ``2.5e-10``."""
    mant, exp = f"{x:.6e}".split("e")
    mant = mant.rstrip("0").rstrip(".")
    return f"{mant}e{int(exp)}"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    informational: bool = False

    def line(self) -> str:
        status = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        return f"{self.name}: {status}" + (f" {self.detail}" if self.detail else "")


def symplectic_residual(mat) -> float:
    n = mat.shape[0] // 2
    om = symplectic_form(n)
    return float(np.max(np.abs(mat @ om @ mat.T - om)))


def check_luc() -> Check:
    om = np.kron(np.eye(3, dtype=np.int64), np.array([[0, 1], [-1, 0]], dtype=np.int64))
    ok = bool(np.array_equal(L_UC @ om @ L_UC.T, om))
    return Check("L_UC symplectic", ok, "(exact integer arithmetic)")


def check_cloners(n: int = 20, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        worst = max(worst, symplectic_residual(cloner_symplectic(ThermalLoss(rng.uniform(1e-3, 1 - 1e-3))).matrix))
        worst = max(worst, symplectic_residual(cloner_symplectic(ThermalAmp(rng.uniform(1.001, 20.0))).matrix))
    return Check(f"beam splitter / two-mode squeezer symplectic ({n} random)", worst < 1e-12, f"@ 1e-12 (max residual {worst:.1e})")


def _random_cm(rng) -> np.ndarray:
    # random single-mode state: thermal * rotation * squeeze
    nu = rng.uniform(1.0, 5.0)
    r, th = rng.uniform(-1.0, 1.0), rng.uniform(0.0, math.pi)
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    return nu * rot @ np.diag([math.exp(2 * r), math.exp(-2 * r)]) @ rot.T


def check_cloner_locality(n: int = 3, seed: int = 1) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        zeta = rng.uniform(1e-3, 4.0)
        v = _random_cm(rng)
        out = dilate_single_mode(AddedNoise(zeta), v).marginal(["B"]).matrix
        worst = max(worst, float(np.max(np.abs(out - (v + 2.0 * zeta * np.eye(2))))))
    return Check(f"universal cloner locality ({n} random zeta)", worst < 1e-12, f"@ 1e-12 (max {worst:.1e})")


def check_dilations(seed: int = 2) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for spec in (ThermalLoss(0.37, 2.2), ThermalAmp(1.7, 1.9), AddedNoise(0.61)):
        for _ in range(5):
            v = _random_cm(rng)
            out = dilate_single_mode(spec, v).marginal(["B"]).matrix
            worst = max(worst, float(np.max(np.abs(out - apply_channel(spec, v).matrix))))
    return Check("dilation reproduces channel", worst < 1e-10, f"@ 1e-10 (max {worst:.1e})")


def check_purity(mu: float = 100.0) -> Check:
    ok = all(build_joint_state(spec, mu).is_pure(1e-6) for specs in GRID.values() for spec in specs)
    return Check(f"purity of dilated states (mu={mu:g})", ok, "@ 1e-6")


def oracle_discrepancies(mu: float) -> list[float]:
    out = []
    for specs in GRID.values():
        for spec in specs:
            target = natural_direction(spec).sender
            for g in GAMMAS:
                closed = delta_of_gamma(spec, g)
                numeric = finite_mu_delta(spec, MeasurementSpec(g, target=target), mu)
                out.append(abs(closed - numeric))
    return out


def check_oracle(mu: float, tol: float) -> Check:
    errs = oracle_discrepancies(mu)
    return Check(f"oracle agreement ({len(errs)} grid points)", max(errs) < tol, f"@ {fmt_tol(tol)} (max {max(errs):.1e})")


def check_theta(mu: float, tol: float = 1e-9, r: float = 0.3) -> Check:
    worst = 0.0
    for specs in GRID.values():
        for spec in specs:
            target = natural_direction(spec).sender
            for g in (1.5, 5.0):
                ref = finite_mu_delta(spec, MeasurementSpec(g, r, 0.0, target), mu)
                for th in (0.3, 0.7, 2.1):
                    worst = max(worst, abs(finite_mu_delta(spec, MeasurementSpec(g, r, th, target), mu) - ref))
    return Check("theta invariance", worst < tol, f"@ {fmt_tol(tol)} (max {worst:.1e})")


def r_differences(spec, gamma: float, mu: float, step: float = 1e-4):
    """Central first difference quotient and raw second difference of delta in r at r = 0."""
    target = natural_direction(spec).sender
    f = [finite_mu_delta(spec, MeasurementSpec(gamma, r, 0.0, target), mu) for r in (-step, 0.0, step)]
    return (f[2] - f[0]) / (2 * step), f[2] - 2 * f[1] + f[0]


def check_r_stationarity(mu: float, tol: float = 1e-6) -> list[Check]:
    worst, n_neg, n = 0.0, 0, 0
    for specs in GRID.values():
        for spec in specs:
            for g in (1.5, 2.5, 5.0):
                d1, d2 = r_differences(spec, g, mu)
                worst = max(worst, abs(d1))
                n_neg += d2 < 0
                n += 1
    return [
        Check("r-stationarity at r=0", worst < tol, f"@ {fmt_tol(tol)} (max |d/dr| {worst:.1e})"),
        Check("r=0 curvature", True, f"negative second difference at {n_neg}/{n} points", informational=True),
    ]


def check_coherent_info(mu: float, tol: float = 1e-3) -> Check:
    worst = 0.0
    for spec in (ThermalLoss(0.5, 1.0), ThermalLoss(0.6, 3.0), ThermalAmp(2.0, 1.0), ThermalAmp(2.0, 3.0), AddedNoise(1.0), AddedNoise(0.38)):
        value, direction = coherent_info(spec)
        worst = max(worst, abs(value - finite_mu_coherent_info(spec, direction, mu)))
        if isinstance(spec, AddedNoise):
            worst = max(worst, abs(value - finite_mu_coherent_info(spec, Direction.REVERSE, mu)))
    return Check("coherent information anchors", worst < tol, f"@ {fmt_tol(tol)} (max {worst:.1e})")


def run_checks(mu: float = 1e6, tolerance: float = 1e-4) -> list[Check]:
    checks = [
        check_luc(),
        check_cloners(),
        check_cloner_locality(),
        check_dilations(),
        check_purity(),
        check_oracle(mu, tolerance),
        check_theta(mu),
    ]
    checks += check_r_stationarity(mu)
    checks.append(check_coherent_info(mu))
    return checks
