"""Numerical tolerances shared by the library, the CLI self-check and the tests."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    symmetry: float = 1e-12
    physicality: float = 1e-9
    pairing: float = 1e-8
    oracle: float = 1e-4
    # h(x) is returned as exactly 0 below this distance from 1
    entropy_floor: float = 1e-9
    # cond(X + V0) above this is treated as singular
    max_condition: float = 1e12


TOL = Tolerances()
