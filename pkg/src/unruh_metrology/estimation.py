"""Quantum and classical Fisher information for the Unruh temperature."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath as mp
import numpy as np

from . import precise
from .errors import InvalidParameter, InvalidPovm, StepTooLarge
from .model import (
    ModelParams,
    Temperature,
    coefficient_derivatives,
    evolved_state,
    sin_cos,
    state_coefficients,
)
from .spectral import model_spectrum, numeric_eigensystem, sld, state_derivative

QFI_FLOOR = 1e-12
POVM_TOL = 1e-10
CFI_CUTOFF = 1e-12


@dataclass(frozen=True)
class Povm:
    elements: tuple

    def __post_init__(self):
        elems = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        if not elems:
            raise InvalidPovm("a POVM needs at least one element")
        total = np.zeros((4, 4), dtype=complex)
        for k, e in enumerate(elems):
            if e.shape != (4, 4):
                raise InvalidPovm(f"element {k} has shape {e.shape}")
            if np.max(np.abs(e - e.conj().T)) > POVM_TOL:
                raise InvalidPovm(f"element {k} is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -POVM_TOL:
                raise InvalidPovm(f"element {k} is not positive semidefinite")
            total += e
        if np.max(np.abs(total - np.eye(4))) > POVM_TOL:
            raise InvalidPovm("elements do not sum to the identity")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def from_basis(cls, vectors: np.ndarray) -> "Povm":
        """Rank-1 projectors onto the columns of a unitary matrix."""
        vectors = np.asarray(vectors)
        return cls(tuple(np.outer(vectors[:, k], vectors[:, k].conj())
                         for k in range(vectors.shape[1])))

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        return np.array([np.trace(e @ rho).real for e in self.elements])


@dataclass(frozen=True)
class FisherReport:
    qfi_closed: float
    qfi_sld: float
    qfi_fidelity: float
    max_rel_disagreement: float


@dataclass(frozen=True)
class CramerRaoBound:
    n_trials: int
    variance_bound: float


def qfi_closed(params: ModelParams) -> float:
    """sum over the support of (dp/dT)^2 / p, using the analytic spectrum.

    The eigenvectors do not depend on T, so only the eigenvalue term survives.
    """
    if params.nu == 0.0:
        return 0.0
    p = state_coefficients(params.theta, params.nu, params.omega, params.temperature)
    dp = coefficient_derivatives(params.theta, params.nu, params.omega, params.temperature)
    s, c = sin_cos(params.theta)
    live = (p.alpha != 0.0, s != 0.0 and p.beta != 0.0, c != 0.0 and p.gamma != 0.0)
    return math.fsum(d * d / v for d, v, ok in zip(dp, p, live) if ok)


def qfi_sld(params: ModelParams, *, numeric: bool = False) -> float:
    """Tr[rho L^2] with L the symmetric logarithmic derivative.

    ``numeric=True`` builds L on the Jacobi eigensystem instead of the closed form.
    """
    rho = evolved_state(params).data
    drho = state_derivative(params)
    spec = numeric_eigensystem(rho) if numeric else model_spectrum(params)
    L = sld(spec, drho)
    return float(np.trace(rho @ L @ L).real)


def _mp_state(theta: float, nu: float, omega: float, t) -> mp.matrix:
    # trig in working precision: a float sin^2 + cos^2 is off by ~1e-16,
    # which would swamp 1 - sqrt(F)
    th = mp.mpf(theta)
    s, c = mp.sin(th), mp.cos(th)
    nu, omega = mp.mpf(nu), mp.mpf(omega)
    e = mp.exp(-omega / t)
    nu2 = nu * nu
    b = nu2 * s * s
    g = nu2 * c * c * e
    norm = (1 - e) + b + g
    alpha, beta, gamma = (1 - e) / norm, b / norm, g / norm
    rho = mp.matrix(4, 4)
    rho[0, 0] = beta
    rho[1, 1] = alpha * s * s
    rho[2, 2] = alpha * c * c
    rho[1, 2] = rho[2, 1] = alpha * s * c
    rho[3, 3] = gamma
    return rho


def _oracle_dps(params: ModelParams, step: float) -> int:
    # 1 - sqrt F scales like (step/T)^2 nu^2 exp(-omega/T). A zero eigenvalue
    # resolved only to 10^-dps leaks 10^(-dps/2) into Tr sqrt, so the working
    # precision must be about twice the number of digits to be resolved.
    t = params.temperature
    digits = (params.omega / (t * math.log(10)) + 2 * math.log10(t / step)
              + 2 * math.log10(1 / max(params.nu, 1e-6)))
    return max(precise.DPS, 2 * math.ceil(digits) + 40)


def qfi_fidelity_oracle(params: ModelParams, step: float) -> float:
    """8 (1 - sqrt F) / step^2 for the states at T - step/2 and T + step/2.

    The fidelity is evaluated from the matrix square-root formula in
    extended precision. Centring the pair on T makes the estimate
    second-order accurate in ``step``.
    """
    t = params.temperature
    if not step > 0.0:
        raise InvalidParameter(f"step must be > 0, got {step!r}")
    if step > 0.1 * t:
        raise StepTooLarge(f"step {step!r} exceeds 0.1 T = {0.1 * t!r}")
    with mp.workdps(_oracle_dps(params, step)):
        half = mp.mpf(step) / 2
        t_mp = mp.mpf(t)
        lo = _mp_state(params.theta, params.nu, params.omega, t_mp - half)
        hi = _mp_state(params.theta, params.nu, params.omega, t_mp + half)
        root_f = precise.root_fidelity(lo, hi)
        value = 8 * (1 - root_f) / mp.mpf(step) ** 2
        return float(value)


def fisher_report(params: ModelParams, step: Optional[float] = None) -> FisherReport:
    if step is None:
        step = 1e-4 * params.temperature
    a = qfi_closed(params)
    b = qfi_sld(params)
    c = qfi_fidelity_oracle(params, step)
    scale = max(a, QFI_FLOOR)
    return FisherReport(a, b, c, max(abs(a - b), abs(a - c)) / scale)


def default_cfi_step(params: ModelParams) -> float:
    return 1e-4 * max(params.temperature, 0.1)


def classical_fi(params: ModelParams, povm: Povm, step: Optional[float] = None, *,
                 cutoff: Optional[float] = None) -> float:
    """Fisher information of the outcome distribution p(xi|T) = Tr[Pi_xi rho_T].

    With ``step`` the derivative of each probability is a central finite
    difference; with ``step=None`` it is Tr[Pi_xi drho/dT] from the analytic
    state derivative. Outcomes with p <= cutoff are skipped (default 1e-12 for
    finite differences, exact zeros only for the analytic derivative).
    """
    rho = evolved_state(params).data
    p = povm.probabilities(rho)
    if step is None:
        dp = povm.probabilities(state_derivative(params))
        if cutoff is None:
            cutoff = 0.0
    else:
        if not step > 0.0:
            raise InvalidParameter(f"step must be > 0, got {step!r}")
        t = params.temperature
        if step >= t:
            raise StepTooLarge(f"step {step!r} must be smaller than T = {t!r}")
        up = povm.probabilities(evolved_state(_with_temperature(params, t + step)).data)
        down = povm.probabilities(evolved_state(_with_temperature(params, t - step)).data)
        dp = (up - down) / (2 * step)
        if cutoff is None:
            cutoff = CFI_CUTOFF
    keep = p > cutoff
    return math.fsum((dp[keep] ** 2 / p[keep]).tolist())


def _with_temperature(params: ModelParams, t: float) -> ModelParams:
    return ModelParams(params.theta, params.omega, params.coupling, Temperature(t))


def optimal_povm(params: ModelParams) -> Povm:
    """Projectors onto the eigenvectors of the evolved state."""
    return Povm.from_basis(model_spectrum(params).eigenvectors)


def random_projective_povm(rng: np.random.Generator) -> Povm:
    """Rank-1 projective measurement in a Haar-random basis."""
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return Povm.from_basis(q)


def cramer_rao(qfi: float, n_trials: int) -> CramerRaoBound:
    """Lower bound 1/(n QFI) on the variance of an unbiased temperature estimate.

    A zero QFI gives ``math.inf``.
    """
    if qfi < 0:
        raise InvalidParameter(f"qfi must be >= 0, got {qfi!r}")
    if int(n_trials) != n_trials or n_trials < 1:
        raise InvalidParameter(f"n_trials must be a positive integer, got {n_trials!r}")
    n_trials = int(n_trials)
    if qfi == 0:
        return CramerRaoBound(n_trials, math.inf)
    return CramerRaoBound(n_trials, 1.0 / (n_trials * qfi))

