"""Phase-insensitive Gaussian channels and the dilations Eve uses to implement them.

Loss and amplification are dilated by an entanglement cloner: one arm ``E``
of a TMSV of variance ``omega`` is mixed with the signal ``B`` on a beam
splitter or two-mode squeezer while the other arm ``e`` is kept.  Added
noise is dilated by the three-mode universal cloner acting on ``(e, E, B)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DomainError
from .symplectic import CovarianceMatrix, gaussian_entropy, symplectic_eigenvalues, tmsv_cm

_I2 = np.eye(2)
_Z = np.diag([1.0, -1.0])

# Symplectic matrix of exp(-i(x_e - x_E) p_B) exp(-i x_B (p_e - p_E)) on modes (e, E, B).
L_UC = np.array(
    [
        [1, 0, 0, 0, 2, 0],
        [0, 5, 0, 4, 0, -2],
        [0, 0, 1, 0, 2, 0],
        [0, -4, 0, -3, 0, 2],
        [2, 0, -2, 0, 1, 0],
        [0, -2, 0, -2, 0, 1],
    ],
    dtype=np.int64,
)


def _check_omega(omega):
    if not omega >= 1.0:
        raise DomainError("omega", f"must be >= 1, got {omega}")


@dataclass(frozen=True)
class ThermalLoss:
    eta: float
    omega: float = 1.0

    name = "thermal_loss"
    param_names = ("eta", "omega")

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise DomainError("eta", f"transmissivity must lie in (0, 1), got {self.eta}")
        _check_omega(self.omega)

    @property
    def params(self):
        return (self.eta, self.omega)


@dataclass(frozen=True)
class ThermalAmp:
    g: float
    omega: float = 1.0

    name = "thermal_amp"
    param_names = ("g", "omega")

    def __post_init__(self):
        if not self.g > 1.0:
            raise DomainError("g", f"gain must exceed 1, got {self.g}")
        _check_omega(self.omega)

    @property
    def params(self):
        return (self.g, self.omega)


@dataclass(frozen=True)
class AddedNoise:
    zeta: float

    name = "added_noise"
    param_names = ("zeta",)

    def __post_init__(self):
        if not self.zeta > 0.0:
            raise DomainError("zeta", f"added noise must be positive, got {self.zeta}")

    @property
    def params(self):
        return (self.zeta,)


ChannelSpec = Union[ThermalLoss, ThermalAmp, AddedNoise]

CHANNELS = {cls.name: cls for cls in (ThermalLoss, ThermalAmp, AddedNoise)}


def make_channel(name: str, **params) -> ChannelSpec:
    try:
        cls = CHANNELS[name]
    except KeyError:
        raise DomainError("channel", f"unknown channel {name!r}") from None
    return cls(**params)


def apply_channel(spec: ChannelSpec, v) -> CovarianceMatrix:
    """Action of the channel on a single-mode covariance matrix."""
    m = np.asarray(v.matrix if isinstance(v, CovarianceMatrix) else v, dtype=float)
    if isinstance(spec, ThermalLoss):
        out = spec.eta * m + (1.0 - spec.eta) * spec.omega * _I2
    elif isinstance(spec, ThermalAmp):
        out = spec.g * m + (spec.g - 1.0) * spec.omega * _I2
    elif isinstance(spec, AddedNoise):
        out = m + 2.0 * spec.zeta * _I2
    else:
        raise TypeError(f"not a channel: {spec!r}")
    return CovarianceMatrix(out)


def eve_omega_for_zeta(zeta: float) -> float:
    """Variance of the TMSV that makes the universal cloner add ``zeta``.

    Inverts ``zeta = 4 (omega - sqrt(omega^2 - 1))`` on ``omega >= 1``.
    """
    if not 0.0 < zeta <= 4.0:
        raise DomainError("zeta", f"the universal cloner realizes 0 < zeta <= 4 only, got {zeta}")
    return zeta / 8.0 + 2.0 / zeta


def eve_omega(spec: ChannelSpec) -> float:
    if isinstance(spec, AddedNoise):
        return eve_omega_for_zeta(spec.zeta)
    return spec.omega


@dataclass(frozen=True)
class Cloner:
    matrix: np.ndarray
    wiring: tuple


def cloner_symplectic(spec: ChannelSpec) -> Cloner:
    if isinstance(spec, ThermalLoss):
        t, s = math.sqrt(spec.eta), math.sqrt(1.0 - spec.eta)
        mat = np.block([[t * _I2, s * _I2], [-s * _I2, t * _I2]])
        return Cloner(mat, ("B", "E"))
    if isinstance(spec, ThermalAmp):
        c, s = math.sqrt(spec.g), math.sqrt(spec.g - 1.0)
        mat = np.block([[c * _I2, s * _Z], [s * _Z, c * _I2]])
        return Cloner(mat, ("B", "E"))
    if isinstance(spec, AddedNoise):
        return Cloner(L_UC.copy(), ("e", "E", "B"))
    raise TypeError(f"not a channel: {spec!r}")


@dataclass(frozen=True)
class JointState:
    labels: tuple
    cm: CovarianceMatrix

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def indices(self, labels: Sequence[str]) -> list[int]:
        return [self.index(lab) for lab in labels]

    def marginal(self, labels: Sequence[str]) -> CovarianceMatrix:
        return self.cm.marginal(self.indices(labels))

    def entropy(self, labels: Sequence[str] | None = None) -> float:
        return gaussian_entropy(self.cm if labels is None else self.marginal(labels))

    def is_pure(self, tol: float = 1e-6) -> bool:
        return bool(np.all(np.abs(symplectic_eigenvalues(self.cm) - 1.0) < tol))


def _embed(local: np.ndarray, modes: Sequence[int], n_modes: int) -> np.ndarray:
    full = np.eye(2 * n_modes)
    idx = [i for m in modes for i in (2 * m, 2 * m + 1)]
    full[np.ix_(idx, idx)] = local
    return full


def _dilate(spec: ChannelSpec, state: JointState) -> JointState:
    cloner = cloner_symplectic(spec)
    s = _embed(cloner.matrix.astype(float), state.indices(cloner.wiring), len(state.labels))
    return JointState(state.labels, CovarianceMatrix(s @ state.cm.matrix @ s.T))


def _with_eve(spec: ChannelSpec, labels: tuple, cm: np.ndarray) -> JointState:
    n = cm.shape[0]
    full = np.zeros((n + 4, n + 4))
    full[:n, :n] = cm
    full[n:, n:] = tmsv_cm(eve_omega(spec)).matrix
    return JointState(labels + ("E", "e"), CovarianceMatrix(full))


def build_joint_state(spec: ChannelSpec, mu: float) -> JointState:
    """Pure state of ``(A, B, E, e)`` after sending ``B`` of a TMSV(mu) through the dilation."""
    return _dilate(spec, _with_eve(spec, ("A", "B"), tmsv_cm(mu).matrix))


def dilate_single_mode(spec: ChannelSpec, v_b) -> JointState:
    """Output ``(B, E, e)`` of the dilation fed with a single-mode input on ``B``."""
    m = np.asarray(v_b.matrix if isinstance(v_b, CovarianceMatrix) else v_b, dtype=float)
    return _dilate(spec, _with_eve(spec, ("B",), m))
