"""Eigensystems of the evolved state and the symmetric logarithmic derivative."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian
from .model import (
    DensityMatrix4,
    ModelParams,
    assemble_state,
    coefficient_derivatives,
    sin_cos,
    state_coefficients,
)

ZERO_EIGENVALUE = 1e-12
HERMITIAN_TOL = 1e-10

_JACOBI_MAX_SWEEPS = 50
_PAIRS = [(p, q) for p in range(4) for q in range(p + 1, 4)]


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (descending), matching eigenvectors as columns, and a zero mask."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    zero_mask: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    @property
    def support(self) -> np.ndarray:
        return ~self.zero_mask


def _sorted(vals, vecs, mask) -> SpectralData:
    order = np.argsort(-vals, kind="stable")
    return SpectralData(vals[order], vecs[:, order], mask[order])


def model_spectrum(params: ModelParams) -> SpectralData:
    """Closed-form eigensystem: {alpha, beta, gamma, 0}.

    Eigenvectors are sin|01> + cos|10>, |00>, |11> and cos|01> - sin|10>;
    none of them depends on the temperature.
    """
    theta, nu = params.theta, params.nu
    s, c = sin_cos(theta)
    coeffs = state_coefficients(theta, nu, params.omega, params.temperature)
    vals = np.array([coeffs.alpha, coeffs.beta, coeffs.gamma, 0.0])
    vecs = np.array([
        [0.0, 1.0, 0.0, 0.0],
        [s, 0.0, 0.0, c],
        [c, 0.0, 0.0, -s],
        [0.0, 0.0, 1.0, 0.0],
    ], dtype=complex)
    mask = np.array([
        coeffs.alpha == 0.0,
        s == 0.0 or nu == 0.0 or coeffs.beta == 0.0,
        c == 0.0 or nu == 0.0 or coeffs.gamma == 0.0,
        True,
    ])
    # exact zeros keep their analytic value
    vals[mask] = 0.0
    return _sorted(vals, vecs, mask)


def jacobi_eigh(matrices: np.ndarray, tol: float = 1e-15) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalisation of a stack of 4x4 Hermitian matrices.

    Rotations are applied in a fixed (p, q) order to the whole batch, so the
    result for a given matrix does not depend on what else is in the stack
    beyond the number of sweeps performed. Returns unsorted eigenvalues of
    shape (N, 4) and eigenvectors as columns, shape (N, 4, 4).
    """
    a = np.array(matrices, dtype=complex)
    if a.ndim == 2:
        a = a[None]
    n = a.shape[0]
    v = np.broadcast_to(np.eye(4, dtype=complex), a.shape).copy()
    rows = np.arange(n)
    scale = np.maximum(np.abs(a).max(axis=(1, 2)), np.finfo(float).tiny)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.abs(a - np.einsum("nii->ni", a)[:, :, None] * np.eye(4)).max(axis=(1, 2))
        if np.all(off <= tol * scale):
            break
        for p, q in _PAIRS:
            apq = a[:, p, q]
            mag = np.abs(apq)
            live = mag > 0.0
            safe = np.where(live, mag, 1.0)
            phase = np.where(live, apq / safe, 1.0)
            tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
            t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(live, t, 0.0)
            cs = 1.0 / np.sqrt(1.0 + t * t)
            sn = t * cs
            u = np.broadcast_to(np.eye(4, dtype=complex), a.shape).copy()
            u[rows, p, p] = cs
            u[rows, p, q] = sn
            u[rows, q, p] = -np.conj(phase) * sn
            u[rows, q, q] = np.conj(phase) * cs
            a = u.conj().transpose(0, 2, 1) @ a @ u
            v = v @ u
    vals = np.einsum("nii->ni", a).real.copy()
    return vals, v


def _finish(vals: np.ndarray, vecs: np.ndarray) -> SpectralData:
    vals = vals.copy()
    vals[(vals < 0.0) & (vals > -ZERO_EIGENVALUE)] = 0.0
    vals[(vals > 1.0) & (vals < 1.0 + ZERO_EIGENVALUE)] = 1.0
    mask = np.abs(vals) < ZERO_EIGENVALUE
    return _sorted(vals, vecs, mask)


def _check_hermitian(m: np.ndarray) -> None:
    dev = np.max(np.abs(m - np.swapaxes(m, -1, -2).conj()))
    if dev > HERMITIAN_TOL:
        raise NotHermitian(f"input deviates from Hermitian by {dev:.3g}")


def numeric_eigensystem(rho) -> SpectralData:
    """General eigendecomposition by cyclic Jacobi; the oracle for model_spectrum."""
    m = np.asarray(rho.data if isinstance(rho, DensityMatrix4) else rho, dtype=complex)
    _check_hermitian(m)
    vals, vecs = jacobi_eigh(m)
    return _finish(vals[0], vecs[0])


def numeric_eigensystems(stack: np.ndarray) -> list[SpectralData]:
    """Batched numeric_eigensystem for an (N, 4, 4) stack."""
    m = np.asarray(stack, dtype=complex)
    _check_hermitian(m)
    vals, vecs = jacobi_eigh(m)
    return [_finish(vals[i], vecs[i]) for i in range(len(vals))]


def state_derivative(params: ModelParams) -> np.ndarray:
    """Temperature derivative of the evolved state, built from analytic coefficient derivatives."""
    d = coefficient_derivatives(params.theta, params.nu, params.omega, params.temperature)
    return assemble_state(params.theta, d).astype(complex)


def sld(spectral: SpectralData, drho: np.ndarray) -> np.ndarray:
    """Symmetric logarithmic derivative in the computational basis.

    Matrix elements are 2<m|drho|n>/(p_m + p_n) in the eigenbasis and zero on
    the kernel-kernel block.
    """
    drho = np.asarray(drho, dtype=complex)
    _check_hermitian(drho)
    v = spectral.eigenvectors
    p = spectral.eigenvalues
    support = spectral.support
    d = v.conj().T @ drho @ v
    denom = p[:, None] + p[None, :]
    keep = (support[:, None] | support[None, :]) & (denom > 0.0)
    l_eig = np.zeros((4, 4), dtype=complex)
    l_eig[keep] = 2.0 * d[keep] / denom[keep]
    out = v @ l_eig @ v.conj().T
    return 0.5 * (out + out.conj().T)
