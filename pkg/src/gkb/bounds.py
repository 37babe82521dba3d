"""Key-rate lower bound from optimal single-mode Gaussian measurements.

For a channel and a measurement seed ``V0 = gamma * I`` on the sending party
``X``, the gain over the coherent information is

    delta(gamma) = S(E|X) - S(Y|X)
                 = h(lam_plus) + h(lam_minus) - h(conditional Y variance)

where ``lam_plus``/``lam_minus`` are the symplectic eigenvalues of Eve's
conditional two-mode state.  All closed forms hold in the limit of an
infinitely squeezed TMSV input; :func:`finite_mu_delta` re-derives the
same quantity by explicit covariance propagation at finite ``mu`` and is
the reference every closed form is tested against.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import AddedNoise, ChannelSpec, ThermalAmp, ThermalLoss, build_joint_state
from .errors import DomainError, NumericalError
from .optimize import OptimizerOptions, ScalarMax, maximize_log_grid
from .symplectic import (
    MeasurementSpec,
    Party,
    condition_on_gaussian_measurement,
    gaussian_entropy,
    thermal_entropy,
    v0_cm,
)

_LN2 = math.log(2.0)


class Direction(str, enum.Enum):
    DIRECT = "direct"
    REVERSE = "reverse"

    @property
    def sender(self) -> Party:
        return Party.A if self is Direction.DIRECT else Party.B

    @property
    def receiver(self) -> Party:
        return Party.B if self is Direction.DIRECT else Party.A


def natural_direction(spec: ChannelSpec) -> Direction:
    """Reconciliation direction used for the bound: reverse for loss, direct otherwise."""
    return Direction.REVERSE if isinstance(spec, ThermalLoss) else Direction.DIRECT


def _gamma(gamma):
    g = np.asarray(gamma, dtype=float)
    if np.any(~(g >= 1.0)):
        raise DomainError("gamma", f"must be >= 1, got min {np.min(g)!r}")
    return g


def _scalar_like(x, like):
    return float(x) if np.ndim(like) == 0 else x


def conditional_y_variance(spec: ChannelSpec, gamma):
    """Variance of the receiving party's mode after the sender measures with ``V0 = gamma I``."""
    g = _gamma(gamma)
    if isinstance(spec, ThermalLoss):
        out = (g + (1.0 - spec.eta) * spec.omega) / spec.eta
    elif isinstance(spec, ThermalAmp):
        out = spec.g * g + (spec.g - 1.0) * spec.omega
    elif isinstance(spec, AddedNoise):
        out = 2.0 * spec.zeta + g
    else:
        raise TypeError(f"not a channel: {spec!r}")
    return _scalar_like(out, gamma)


def _eigs_from_invariants(a, s, product):
    # lam_plus^2 = (a + s) / 2; lam_minus from the determinant, which avoids a - s cancellation
    lam_p = np.sqrt(0.5 * (a + s))
    return lam_p, product / lam_p


def _eve_eigs_derived(spec: ChannelSpec, g: np.ndarray):
    if isinstance(spec, ThermalLoss):
        eta, w = spec.eta, spec.omega
        t = 1.0 - eta
        a = t * t * (g * g + w * w) + 2.0 * t * g * w + 2.0 * eta
        s = t * (g + w) * np.sqrt(t * t * (g - w) ** 2 + 4.0 * t * g * w + 4.0 * eta)
        lam_p, lam_m = _eigs_from_invariants(a, s, eta * (t * g * w + 1.0))
        return lam_p / eta, lam_m / eta
    if isinstance(spec, ThermalAmp):
        k, w = spec.g, spec.omega
        t = k - 1.0
        a = t * t * (g * g + w * w) + 2.0 * k * t * g * w + 2.0 * k
        s = t * (g + w) * np.sqrt(t * t * (g * g + w * w) + 2.0 * g * w * (k * k - 1.0) + 4.0 * k)
        return _eigs_from_invariants(a, s, t * g * w + k)
    if isinstance(spec, AddedNoise):
        z = spec.zeta
        root = np.sqrt(1.0 + z * z + 2.0 * z * g)
        lam_p = np.sqrt(1.0 + 2.0 * z * (z + g + root))
        return lam_p, (1.0 + 2.0 * z * g) / lam_p
    raise TypeError(f"not a channel: {spec!r}")


def _eve_eigs_printed(spec: ChannelSpec, g: np.ndarray):
    """Uncorrected reference radicals, kept for auditing only."""
    if isinstance(spec, ThermalLoss):
        eta, w = spec.eta, spec.omega
        a = (eta - 1.0) ** 2 * (g - w) ** 2 + 2.0 * eta
        b = (eta - 1.0) ** 2 * (g + w) ** 2 * ((eta - 1.0) ** 2 * (g - w) ** 2 - 4.0 * g * w * (eta - 1.0) + 4.0 * eta)
        scale = math.sqrt(2.0) * eta
    elif isinstance(spec, ThermalAmp):
        k, w = spec.g, spec.omega
        a = (k - 1.0) ** 2 * (g * g + 2.0 * k * g * w + w * w) + 2.0 * k
        b = (k - 1.0) ** 2 * (g + w) ** 2 * (
            g * g * (k - 1.0) ** 2 - 2.0 * g * (k * k - 1.0) * w + (k - 1.0) ** 2 * w * w + 4.0 * k
        )
        scale = math.sqrt(2.0)
    elif isinstance(spec, AddedNoise):
        z = spec.zeta
        root = 4.0 + z * z + 4.0 * z * g
        if np.any(root < 0):
            raise NumericalError("negative radicand in printed added-noise eigenvalues")
        inner_p = 1.0 + 0.5 * z * (z + 2.0 * g + np.sqrt(root))
        inner_m = 1.0 + 0.5 * z * (z + 2.0 * g - np.sqrt(root))
        return np.sqrt(inner_p), np.sqrt(inner_m)
    else:
        raise TypeError(f"not a channel: {spec!r}")
    if np.any(b < 0) or np.any(a - np.sqrt(np.abs(b)) < 0):
        raise NumericalError(f"negative radicand in printed eigenvalues for {spec}")
    return np.sqrt(a + np.sqrt(b)) / scale, np.sqrt(a - np.sqrt(b)) / scale


def eve_eigs_closed(spec: ChannelSpec, gamma, printed: bool = False):
    """Symplectic eigenvalues ``(lam_plus, lam_minus)`` of Eve's conditional state.

    ``printed=True`` evaluates the uncorrected reference radicals.  Those
    disagree with covariance propagation and are kept only so the
    discrepancy can be reproduced.
    """
    g = _gamma(gamma)
    lam_p, lam_m = (_eve_eigs_printed if printed else _eve_eigs_derived)(spec, g)
    if not printed and (np.any(lam_m < 1.0 - 1e-9) or np.any(np.isnan(lam_p))):
        raise NumericalError(f"unphysical closed-form eigenvalues for {spec}")
    return _scalar_like(lam_p, gamma), _scalar_like(lam_m, gamma)


def delta_of_gamma(spec: ChannelSpec, gamma):
    """``delta(gamma)`` in bits, vectorized over ``gamma``."""
    lam_p, lam_m = eve_eigs_closed(spec, gamma)
    y = conditional_y_variance(spec, gamma)
    out = thermal_entropy(np.maximum(lam_p, 1.0)) + thermal_entropy(np.maximum(lam_m, 1.0)) - thermal_entropy(y)
    return _scalar_like(out, gamma)


def maximize_delta(spec: ChannelSpec, opts: OptimizerOptions | None = None) -> ScalarMax:
    """``max_{gamma >= 1} delta(gamma)``; unpacks as ``(delta_g, gamma_star)``."""
    opts = opts or OptimizerOptions()
    return maximize_log_grid(lambda g: delta_of_gamma(spec, g), opts)


def coherent_info(spec: ChannelSpec, printed: bool = False) -> tuple[float, Direction]:
    """Coherent information (direct) or reverse coherent information, in bits.

    With ``printed=True`` the amplifier value takes the uncorrected sign,
    which is non-positive everywhere and contradicts propagation.
    """
    if isinstance(spec, ThermalLoss):
        return -math.log2(1.0 - spec.eta) - thermal_entropy(spec.omega), Direction.REVERSE
    if isinstance(spec, ThermalAmp):
        core = math.log2(spec.g / (spec.g - 1.0))
        return (-core if printed else core) - thermal_entropy(spec.omega), Direction.DIRECT
    if isinstance(spec, AddedNoise):
        return -1.0 / _LN2 - math.log2(spec.zeta), Direction.DIRECT
    raise TypeError(f"not a channel: {spec!r}")


def upper_bound(spec: ChannelSpec, printed: bool = False) -> float:
    """Reference upper bound on the secret-key capacity, in bits."""
    if isinstance(spec, ThermalLoss):
        n_th = 0.5 * (spec.omega - 1.0)
        eta = spec.eta
        if printed:
            return -n_th * math.log2(1.0 - eta) - thermal_entropy(spec.omega)
        return -math.log2(1.0 - eta) - n_th * math.log2(eta) - thermal_entropy(spec.omega)
    if isinstance(spec, ThermalAmp):
        n_th = 0.5 * (spec.omega - 1.0)
        g = spec.g
        if printed:
            return -(n_th * math.log2(g) - math.log2(g - 1.0)) - thermal_entropy(spec.omega)
        return (n_th + 1.0) * math.log2(g) - math.log2(g - 1.0) - thermal_entropy(spec.omega)
    if isinstance(spec, AddedNoise):
        return (spec.zeta - 1.0) / _LN2 - math.log2(spec.zeta)
    raise TypeError(f"not a channel: {spec!r}")


@dataclass(frozen=True)
class BoundResult:
    channel: ChannelSpec
    direction: Direction
    gamma_star: float
    delta_g: float
    info_term: float
    lower_bound: float
    upper_bound: float
    path: str = "closed_form"
    diagnostics: tuple = field(default_factory=tuple)


def lower_bound(spec: ChannelSpec, opts: OptimizerOptions | None = None) -> BoundResult:
    opts = opts or OptimizerOptions()
    info, direction = coherent_info(spec)
    best = maximize_delta(spec, opts)
    diagnostics = ()
    if best.at_upper_boundary:
        diagnostics = (f"argmax at gamma_max={opts.gamma_max:g}",)
    return BoundResult(
        channel=spec,
        direction=direction,
        gamma_star=best.argmax,
        delta_g=best.value,
        info_term=info,
        lower_bound=info + best.value,
        upper_bound=upper_bound(spec),
        diagnostics=diagnostics,
    )


# -- finite-mu covariance propagation ---------------------------------------


def _check_target(spec: ChannelSpec, target: Party, override: bool):
    if override or isinstance(spec, AddedNoise):
        return
    expected = natural_direction(spec).sender
    if target != expected:
        raise DomainError("target", f"{spec.name} is analysed with the measurement on {expected.value}")


def _rounding_slack(mu: float) -> float:
    return max(1e-9, 64.0 * np.finfo(float).eps * mu)


def finite_mu_delta(spec: ChannelSpec, m: MeasurementSpec, mu: float = 1e6, override: bool = False) -> float:
    """``S(E|X) - S(Y|X)`` from the explicit four-mode state at input variance ``mu``.

    ``X`` is ``m.target``, ``Y`` the other legitimate party and ``E`` Eve's
    pair ``(E, e)``.  Every closed form in this module converges to this
    value as ``mu`` grows.
    """
    _check_target(spec, m.target, override)
    state = build_joint_state(spec, mu)
    sender = state.index(m.target.value)
    receiver = state.index("B" if m.target is Party.A else "A")
    v0 = v0_cm(m)
    eve = condition_on_gaussian_measurement(state.cm, state.indices(("E", "e")), sender, v0)
    rest = condition_on_gaussian_measurement(state.cm, [receiver], sender, v0)
    # Schur complements of O(mu) blocks carry absolute rounding error ~ mu * eps
    slack = _rounding_slack(mu)
    return gaussian_entropy(eve, slack) - gaussian_entropy(rest, slack)


def finite_mu_coherent_info(spec: ChannelSpec, direction: Direction | str, mu: float = 1e6) -> float:
    """``S(local) - S(AB)`` with ``local = B`` (direct) or ``A`` (reverse)."""
    direction = Direction(direction)
    state = build_joint_state(spec, mu)
    local = direction.receiver.value
    slack = _rounding_slack(mu)
    return gaussian_entropy(state.marginal([local]), slack) - gaussian_entropy(state.marginal(["A", "B"]), slack)
