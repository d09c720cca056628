"""Extended-precision linear algebra for the brute-force oracles.

The fidelity-based QFI divides ``1 - sqrt(F)`` by ``step**2``, and the
Wootters construction takes square roots of eigenvalues that are exactly zero
for the model states. Both lose most of their digits in double precision, so
the oracles evaluate them with mpmath instead.
"""
from __future__ import annotations

import mpmath as mp
import numpy as np

DPS = 60


def to_mp(m) -> mp.matrix:
    m = np.asarray(m)
    out = mp.matrix(m.shape[0], m.shape[1])
    real = not np.iscomplexobj(m) or not np.any(np.imag(m))
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            z = m[i, j]
            out[i, j] = mp.mpf(float(np.real(z))) if real else mp.mpc(complex(z))
    return out


def _is_real(m: mp.matrix) -> bool:
    return all(not isinstance(m[i, j], mp.mpc) or m[i, j].imag == 0
               for i in range(m.rows) for j in range(m.cols))


def _realify(m: mp.matrix) -> mp.matrix:
    out = mp.matrix(m.rows, m.cols)
    for i in range(m.rows):
        for j in range(m.cols):
            out[i, j] = mp.re(m[i, j])
    return out


def eigh(m: mp.matrix):
    """Hermitian eigendecomposition; real symmetric input takes the faster path."""
    if _is_real(m):
        return mp.eigsy(_realify(m))
    return mp.eighe(m)


def psd_sqrt(m: mp.matrix) -> mp.matrix:
    vals, vecs = eigh(m)
    n = m.rows
    root = mp.matrix(n, n)
    for k in range(n):
        lam = vals[k]
        r = mp.sqrt(lam) if lam > 0 else mp.mpf(0)
        if r == 0:
            continue
        for i in range(n):
            for j in range(n):
                root[i, j] += r * vecs[i, k] * mp.conj(vecs[j, k])
    return root


def trace_sqrt(m: mp.matrix) -> mp.mpf:
    """Tr sqrt(m) for a positive semidefinite m."""
    vals, _ = eigh(m)
    return mp.fsum(mp.sqrt(v) for v in vals if v > 0)


def root_fidelity(rho: mp.matrix, sigma: mp.matrix) -> mp.mpf:
    """sqrt of the Uhlmann fidelity, Tr sqrt(sqrt(rho) sigma sqrt(rho))."""
    r = psd_sqrt(rho)
    inner = r * sigma * r
    inner = (inner + inner.H) / 2
    return trace_sqrt(inner)


def general_eigenvalues(m: mp.matrix) -> list:
    return mp.eig(m, left=False, right=False)
