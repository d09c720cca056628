"""Physical parameters, the probe state and the evolved two-detector state.

Natural units (c = hbar = k_B = 1) are used everywhere. Basis ordering is
fixed as (|00>, |01>, |10>, |11>) with Alice's detector as the first qubit,
so index 1 is |0_A 1_R> and index 2 is |1_A 0_R>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .errors import (
    CouplingOutOfRange,
    DegenerateTemperature,
    InvalidDensityMatrix,
    InvalidParameter,
)

HALF_PI = math.pi / 2

#: soft upper bound on nu before the perturbative result is flagged
PERTURBATIVE_NU = 0.3
#: "a << b" is read as 10 a <= b
SCALE_SEPARATION = 10.0

FLAG_NONPERTURBATIVE = "nu_nonperturbative"
FLAG_SCALE_SEPARATION = "scale_separation_violated"

_TOL = 1e-12


# -- parameter types ---------------------------------------------------------

@dataclass(frozen=True)
class DirectNu:
    """Effective coupling given directly."""

    nu: float

    def __post_init__(self):
        if not (0.0 <= self.nu < 1.0):
            raise InvalidParameter(f"nu must lie in [0, 1), got {self.nu!r}")


@dataclass(frozen=True)
class Physical:
    """Effective coupling built from coupling constant, interaction time and smearing width."""

    epsilon: float
    delta: float
    kappa: float

    def __post_init__(self):
        for name in ("epsilon", "delta", "kappa"):
            value = getattr(self, name)
            if not value > 0.0:
                raise InvalidParameter(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class Acceleration:
    a: float

    def __post_init__(self):
        if not self.a > 0.0:
            raise InvalidParameter(f"acceleration must be > 0, got {self.a!r}")


@dataclass(frozen=True)
class Temperature:
    t: float

    def __post_init__(self):
        if not self.t > 0.0:
            raise DegenerateTemperature(f"temperature must be > 0, got {self.t!r}")


CouplingSpec = Union[DirectNu, Physical]
Kinematics = Union[Acceleration, Temperature]


def unruh_temperature(kin: Kinematics) -> float:
    """Temperature seen by the accelerated detector, T = a / 2pi."""
    if isinstance(kin, Acceleration):
        return kin.a / (2 * math.pi)
    return kin.t


def to_acceleration(kin: Kinematics) -> float:
    if isinstance(kin, Acceleration):
        return kin.a
    return 2 * math.pi * kin.t


def effective_coupling(coupling: CouplingSpec, omega: float) -> float:
    """Resolve the dimensionless coupling nu.

    For physical parameters nu^2 = eps^2 Omega Delta / (2 pi) * exp(-Omega^2 kappa^2).
    Raises CouplingOutOfRange when the result is not below 1.
    """
    if not omega > 0.0:
        raise InvalidParameter(f"omega must be > 0, got {omega!r}")
    if isinstance(coupling, DirectNu):
        return coupling.nu
    nu2 = (coupling.epsilon ** 2 * omega * coupling.delta / (2 * math.pi)
           * math.exp(-(omega * coupling.kappa) ** 2))
    nu = math.sqrt(nu2)
    if nu >= 1.0:
        raise CouplingOutOfRange(f"effective coupling nu = {nu:.6g} >= 1")
    return nu


def validity_flags(coupling: CouplingSpec, omega: float, nu: float) -> frozenset[str]:
    flags = set()
    if nu >= PERTURBATIVE_NU:
        flags.add(FLAG_NONPERTURBATIVE)
    if isinstance(coupling, Physical):
        # eps << 1/Omega << Delta
        inv_gap = 1.0 / omega
        if not (SCALE_SEPARATION * coupling.epsilon <= inv_gap
                and SCALE_SEPARATION * inv_gap <= coupling.delta):
            flags.add(FLAG_SCALE_SEPARATION)
    return frozenset(flags)


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the two-detector model.

    ``nu``, ``temperature`` and ``flags`` are resolved at construction, so an
    instance that exists is always usable.
    """

    theta: float
    omega: float
    coupling: CouplingSpec
    kinematics: Kinematics
    nu: float = field(init=False, repr=False, compare=False)
    temperature: float = field(init=False, repr=False, compare=False)
    flags: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0.0 <= self.theta <= HALF_PI):
            raise InvalidParameter(f"theta must lie in [0, pi/2], got {self.theta!r}")
        if not self.omega > 0.0:
            raise InvalidParameter(f"omega must be > 0, got {self.omega!r}")
        nu = effective_coupling(self.coupling, self.omega)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "temperature", unruh_temperature(self.kinematics))
        object.__setattr__(self, "flags", validity_flags(self.coupling, self.omega, nu))

    @classmethod
    def from_values(cls, theta, omega, *, nu=None, epsilon=None, delta=None, kappa=None,
                    acceleration=None, temperature=None) -> "ModelParams":
        """Convenience constructor from plain numbers."""
        if nu is not None:
            coupling = DirectNu(nu)
        else:
            coupling = Physical(epsilon, delta, kappa)
        if acceleration is not None:
            kin = Acceleration(acceleration)
        else:
            kin = Temperature(temperature)
        return cls(theta, omega, coupling, kin)

    @property
    def acceleration(self) -> float:
        return to_acceleration(self.kinematics)

    def resolved(self) -> dict:
        """Plain-dict view of every input and derived quantity."""
        out = {"theta": self.theta, "omega": self.omega}
        if isinstance(self.coupling, DirectNu):
            out["coupling"] = {"mode": "nu", "nu": self.coupling.nu}
        else:
            out["coupling"] = {"mode": "physical", "epsilon": self.coupling.epsilon,
                               "delta": self.coupling.delta, "kappa": self.coupling.kappa}
        if isinstance(self.kinematics, Acceleration):
            out["kinematics"] = {"mode": "acceleration", "acceleration": self.kinematics.a}
        else:
            out["kinematics"] = {"mode": "temperature", "temperature": self.kinematics.t}
        out["nu"] = self.nu
        out["temperature"] = self.temperature
        out["acceleration"] = self.acceleration
        out["flags"] = sorted(self.flags)
        return out


# -- states ------------------------------------------------------------------

class DensityMatrix4:
    """Validated 4x4 density matrix in the (|00>, |01>, |10>, |11>) basis."""

    __slots__ = ("_data",)

    def __init__(self, entries, *, check: bool = True):
        data = np.array(entries, dtype=complex)
        if data.shape != (4, 4):
            raise InvalidDensityMatrix(f"expected a 4x4 matrix, got shape {data.shape}")
        if check:
            _check_density(data)
        data.setflags(write=False)
        self._data = data

    @property
    def data(self) -> np.ndarray:
        return self._data

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data.copy()
        return self._data.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix4({self._data!r})"


def _check_density(m: np.ndarray) -> None:
    herm = np.max(np.abs(m - m.conj().T))
    if herm > _TOL:
        raise InvalidDensityMatrix(f"matrix is not Hermitian (deviation {herm:.3g})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > _TOL:
        raise InvalidDensityMatrix(f"trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(m).min()
    if lo < -_TOL:
        raise InvalidDensityMatrix(f"matrix has negative eigenvalue {lo:.3g}")


def sin_cos(theta: float) -> tuple[float, float]:
    """sin and cos of the probe angle, exact at the two endpoints."""
    if theta == 0.0:
        return 0.0, 1.0
    if theta == HALF_PI:
        return 1.0, 0.0
    return math.sin(theta), math.cos(theta)


def probe_vector(theta: float) -> np.ndarray:
    """sin(theta)|0_A 1_R> + cos(theta)|1_A 0_R>."""
    s, c = sin_cos(theta)
    return np.array([0.0, s, c, 0.0])


def probe_state(theta: float) -> DensityMatrix4:
    if not (0.0 <= theta <= HALF_PI):
        raise InvalidParameter(f"theta must lie in [0, pi/2], got {theta!r}")
    psi = probe_vector(theta)
    return DensityMatrix4(np.outer(psi, psi))


class StateCoefficients(NamedTuple):
    alpha: float
    beta: float
    gamma: float


def _boltzmann(omega: float, t: float) -> tuple[float, float]:
    """exp(-Omega/T) and 1 - exp(-Omega/T), the latter without cancellation."""
    x = -omega / t
    return math.exp(x), -math.expm1(x)


def state_coefficients(theta: float, nu: float, omega: float, t: float) -> StateCoefficients:
    """Weights of the probe projector, |00><00| and |11><11| in the evolved state."""
    if not t > 0.0:
        raise DegenerateTemperature(f"temperature must be > 0, got {t!r}")
    s, c = sin_cos(theta)
    e, one_minus_e = _boltzmann(omega, t)
    nu2 = nu * nu
    b = nu2 * s * s
    g = nu2 * c * c * e
    norm = one_minus_e + b + g
    return StateCoefficients(one_minus_e / norm, b / norm, g / norm)


def coefficient_derivatives(theta: float, nu: float, omega: float,
                            t: float) -> StateCoefficients:
    """Analytic temperature derivatives of (alpha, beta, gamma).

    With e = exp(-Omega/T), s = nu^2 sin^2, c = nu^2 cos^2 and
    D = (1 - e) + s + c e:
        d alpha = -e' nu^2 / D^2
        d beta  =  e' s (1 - c) / D^2
        d gamma =  e' c (1 + s) / D^2
    where e' = (Omega / T^2) e.
    """
    if not t > 0.0:
        raise DegenerateTemperature(f"temperature must be > 0, got {t!r}")
    sn, cs = sin_cos(theta)
    e, one_minus_e = _boltzmann(omega, t)
    nu2 = nu * nu
    s = nu2 * sn * sn
    c = nu2 * cs * cs
    d2 = (one_minus_e + s + c * e) ** 2
    de = omega / (t * t) * e
    return StateCoefficients(-de * nu2 / d2, de * s * (1.0 - c) / d2, de * c * (1.0 + s) / d2)


def normalization_norm(theta: float, nu: float, omega: float, acceleration: float) -> float:
    """Squared norm of the unnormalised detector-field state, written in terms of a.

    Its reciprocal must equal alpha; used as a cross-formula consistency check.
    """
    s, c = sin_cos(theta)
    x = -2 * math.pi * omega / acceleration
    e = math.exp(x)
    one_minus_e = -math.expm1(x)
    nu2 = nu * nu
    return 1.0 + s * s * nu2 / one_minus_e + c * c * nu2 * e / one_minus_e


_P00 = np.diag([1.0, 0.0, 0.0, 0.0])
_P11 = np.diag([0.0, 0.0, 0.0, 1.0])


def assemble_state(theta: float, coeffs: StateCoefficients) -> np.ndarray:
    """alpha |Psi><Psi| + beta |00><00| + gamma |11><11| as a plain array."""
    psi = probe_vector(theta)
    return coeffs.alpha * np.outer(psi, psi) + coeffs.beta * _P00 + coeffs.gamma * _P11


def evolved_state(params: ModelParams) -> DensityMatrix4:
    coeffs = state_coefficients(params.theta, params.nu, params.omega, params.temperature)
    return DensityMatrix4(assemble_state(params.theta, coeffs))
