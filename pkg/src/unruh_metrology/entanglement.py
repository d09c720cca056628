"""Concurrence of two-qubit X states."""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import precise
from .errors import NotXState
from .model import DensityMatrix4

X_PATTERN_TOL = 1e-10
_SQRT_CLAMP = 1e-14

# entries allowed to be nonzero in an X state: diagonal and anti-diagonal
_X_MASK = np.eye(4, dtype=bool) | np.fliplr(np.eye(4, dtype=bool))

_SIGMA_YY = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=float)


@dataclass(frozen=True)
class XStateView:
    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex
    rho23: complex

    def __post_init__(self):
        diag = self.rho11 + self.rho22 + self.rho33 + self.rho44
        if abs(diag - 1.0) > 1e-12:
            raise NotXState(f"diagonal sums to {diag!r}, expected 1")
        if abs(self.rho14) > math.sqrt(max(self.rho11 * self.rho44, 0.0)) + 1e-10:
            raise NotXState("|rho14| exceeds sqrt(rho11 rho44)")
        if abs(self.rho23) > math.sqrt(max(self.rho22 * self.rho33, 0.0)) + 1e-10:
            raise NotXState("|rho23| exceeds sqrt(rho22 rho33)")


def as_x_state(rho) -> XStateView:
    m = np.asarray(rho.data if isinstance(rho, DensityMatrix4) else rho, dtype=complex)
    outside = np.abs(m[~_X_MASK])
    if outside.size and outside.max() >= X_PATTERN_TOL:
        raise NotXState(f"entry outside the X pattern has modulus {outside.max():.3g}")
    return XStateView(m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real,
                      complex(m[0, 3]), complex(m[1, 2]))


def _clamped_sqrt(x: float) -> float:
    if x < 0.0:
        if x < -_SQRT_CLAMP:
            raise NotXState(f"negative product {x!r} under square root")
        return 0.0
    return math.sqrt(x)


def concurrence(x: XStateView) -> float:
    """2 max{0, |rho14| - sqrt(rho22 rho33), |rho23| - sqrt(rho11 rho44)}, clipped to [0, 1]."""
    c1 = _clamped_sqrt((x.rho14 * x.rho14.conjugate()).real) - _clamped_sqrt(x.rho22 * x.rho33)
    c2 = _clamped_sqrt((x.rho23 * x.rho23.conjugate()).real) - _clamped_sqrt(x.rho11 * x.rho44)
    return min(1.0, 2.0 * max(0.0, c1, c2))


def state_concurrence(rho) -> float:
    return concurrence(as_x_state(rho))


def wootters_concurrence(rho) -> float:
    """General two-qubit concurrence from the spectrum of rho (sy x sy) rho* (sy x sy).

    Evaluated in extended precision: for the model states one eigenvalue of
    that product is exactly zero and its square root is ill-conditioned in
    double precision. Test oracle only.
    """
    m = np.asarray(rho.data if isinstance(rho, DensityMatrix4) else rho, dtype=complex)
    tilde = _SIGMA_YY @ m.conj() @ _SIGMA_YY
    with mp.workdps(40):
        r = precise.to_mp(m) * precise.to_mp(tilde)
        lams = precise.general_eigenvalues(r)
        roots = sorted((mp.sqrt(max(mp.re(v), 0)) for v in lams), reverse=True)
        value = roots[0] - roots[1] - roots[2] - roots[3]
        return float(min(max(value, 0), 1))
