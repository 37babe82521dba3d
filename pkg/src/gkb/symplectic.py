"""Gaussian-state linear algebra in the vacuum = identity convention.

Quadratures are ordered mode by mode, ``(x1, p1, x2, p2, ...)``.  Every
covariance matrix handled here describes a zero-mean state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericalError, SingularBlockError
from .tolerances import TOL

_LN2 = math.log(2.0)
_Z = np.diag([1.0, -1.0])


class Party(str, enum.Enum):
    A = "A"
    B = "B"


class CovarianceMatrix:
    """Real symmetric ``2n x 2n`` covariance matrix of an ``n``-mode Gaussian state.

    The input is symmetrized on construction and the stored array is
    read-only.  Physicality is only checked on request (:meth:`is_physical`).
    """

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise DomainError("matrix", f"expected a square even-sized matrix, got shape {m.shape}")
        m = 0.5 * (m + m.T)
        m.flags.writeable = False
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def n_modes(self) -> int:
        return self._m.shape[0] // 2

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __repr__(self):
        return f"CovarianceMatrix(n_modes={self.n_modes})"

    def block(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> np.ndarray:
        """Sub-matrix coupling the quadratures of ``rows`` modes to ``cols`` modes."""
        cols = rows if cols is None else cols
        return self._m[np.ix_(_quadrature_index(rows), _quadrature_index(cols))]

    def marginal(self, modes: Sequence[int]) -> CovarianceMatrix:
        return CovarianceMatrix(self.block(modes))

    def is_physical(self, tol: float = TOL.physicality) -> bool:
        if np.any(np.linalg.eigvalsh(self._m) <= 0):
            return False
        return bool(symplectic_eigenvalues(self)[-1] >= 1.0 - tol)


def _quadrature_index(modes: Sequence[int]) -> list[int]:
    return [i for m in modes for i in (2 * m, 2 * m + 1)]


def _as_array(v) -> np.ndarray:
    return v.matrix if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class MeasurementSpec:
    """Seed state ``gamma * R(theta) S(2r) R(theta)^T`` of a single-mode Gaussian POVM on ``target``."""

    gamma: float
    r: float = 0.0
    theta: float = 0.0
    target: Party = Party.B

    def __post_init__(self):
        if not self.gamma >= 1.0:
            raise DomainError("gamma", f"must be >= 1, got {self.gamma}")
        object.__setattr__(self, "target", Party(self.target))


def thermal_entropy(x):
    """Von Neumann entropy, in bits, of a thermal mode with covariance ``x * I``.

    Accepts scalars or arrays.  Arguments within ``1e-9`` of 1 give exactly 0;
    anything further below 1 is unphysical and raises :class:`DomainError`.

    >>> float(thermal_entropy(3.0))
    2.0
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 1.0 - TOL.physicality)):
        raise DomainError("x", f"thermal entropy needs x >= 1, got min {np.min(arr)!r}")
    b = 0.5 * (arr - 1.0)
    a = b + 1.0
    out = np.zeros_like(arr)
    small = (b > 0.5 * TOL.entropy_floor) & (b < 1.0)
    large = b >= 1.0
    bs = b[small]
    out[small] = (a[small] * np.log(a[small]) - bs * np.log(bs)) / _LN2
    # a log a - b log b = log b + a log(1 + 1/b), free of cancellation for large x
    bl = b[large]
    out[large] = (np.log(bl) + a[large] * np.log1p(1.0 / bl)) / _LN2
    return out if out.ndim else float(out)


def tmsv_cm(mu: float) -> CovarianceMatrix:
    """Two-mode squeezed vacuum with local variance ``mu``."""
    if not mu >= 1.0:
        raise DomainError("mu", f"must be >= 1, got {mu}")
    c = math.sqrt(mu * mu - 1.0)
    return CovarianceMatrix(np.block([[mu * np.eye(2), c * _Z], [c * _Z, mu * np.eye(2)]]))


def thermal_cm(nu: float, n_modes: int = 1) -> CovarianceMatrix:
    if not nu >= 1.0:
        raise DomainError("nu", f"must be >= 1, got {nu}")
    return CovarianceMatrix(nu * np.eye(2 * n_modes))


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeeze(r: float) -> np.ndarray:
    return np.diag([math.exp(2.0 * r), math.exp(-2.0 * r)])


def v0_cm(spec: MeasurementSpec) -> CovarianceMatrix:
    rot = rotation(spec.theta)
    return CovarianceMatrix(spec.gamma * rot @ squeeze(spec.r) @ rot.T)


def symplectic_eigenvalues(v, method: str = "cholesky") -> np.ndarray:
    """Symplectic spectrum of ``v`` in descending order.

    ``method="cholesky"`` (default) factors ``V = L L^T`` and reads the
    spectrum off the Hermitian matrix ``i L^T Ω L``, whose eigenvalues are
    ``±λ``.  Being a Hermitian eigenproblem it is backward stable, with
    absolute error ~ ``eps * ||V||``.  ``"direct"`` takes the moduli of the
    eigenvalues of the non-normal ``ΩV``; ``"squared"`` takes square roots of
    the eigenvalues of ``-(ΩV)^2`` and loses digits once entries reach ~1e6.
    Both are kept as cross-checks.

    Raises :class:`NumericalError` for asymmetric or non-positive-definite
    input, or if the eigenvalues do not come in matching pairs.
    """
    m = _as_array(v)
    n = m.shape[0] // 2
    om = symplectic_form(n)
    if method == "cholesky":
        if np.max(np.abs(m - m.T)) > TOL.symmetry * max(1.0, float(np.max(np.abs(m)))):
            raise NumericalError("covariance matrix is not symmetric")
        try:
            low = np.linalg.cholesky(m)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("covariance matrix is not positive definite") from exc
        vals = np.abs(np.linalg.eigvalsh(1j * (low.T @ om @ low)))
    elif method == "direct":
        vals = np.abs(np.linalg.eigvals(om @ m).imag)
    elif method == "squared":
        om_v = om @ m
        vals = np.sqrt(np.abs(np.linalg.eigvals(-(om_v @ om_v)).real))
    else:
        raise ValueError(f"unknown method {method!r}")
    vals = np.sort(vals)[::-1]
    first, second = vals[0::2], vals[1::2]
    if np.any(np.abs(first - second) > TOL.pairing * np.maximum(1.0, first)):
        raise NumericalError(f"unpaired symplectic spectrum {vals}")
    return 0.5 * (first + second)


def gaussian_entropy(v, slack: float = 0.0) -> float:
    """Entropy in bits; eigenvalues within ``slack`` below 1 are treated as 1."""
    lam = symplectic_eigenvalues(v)
    if slack:
        lam = np.where(lam >= 1.0 - slack, np.maximum(lam, 1.0), lam)
    return float(np.sum(thermal_entropy(lam)))


def condition_on_gaussian_measurement(
    v_joint,
    kept_modes: Sequence[int],
    measured_mode: int,
    v0,
) -> CovarianceMatrix:
    """Covariance of ``kept_modes`` after a Gaussian measurement of ``measured_mode``.

    Implements the Schur complement ``Y - C (X + V0)^-1 C^T``.  The result
    does not depend on the measurement outcome.
    """
    if measured_mode in kept_modes:
        raise DomainError("measured_mode", "must not be one of the kept modes")
    cm = v_joint if isinstance(v_joint, CovarianceMatrix) else CovarianceMatrix(v_joint)
    y = cm.block(kept_modes)
    x = cm.block([measured_mode])
    c = cm.block(kept_modes, [measured_mode])
    s = x + _as_array(v0)
    if np.linalg.cond(s) > TOL.max_condition:
        raise SingularBlockError("X + V0 is numerically singular")
    return CovarianceMatrix(y - c @ np.linalg.solve(s, c.T))
