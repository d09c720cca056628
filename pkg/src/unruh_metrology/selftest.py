"""Cross-route consistency checks shipped with the command-line tool."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import estimation, model, spectral
from .errors import MetrologyError

SEED = 20161016
N_DRAWS = 24
N_RANDOM_POVMS = 20


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    worst: float
    tolerance: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name:<28} worst={self.worst:.3e} tol={self.tolerance:.0e}"


def parameter_set(seed: int = SEED, n: int = N_DRAWS) -> list[model.ModelParams]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        theta = rng.uniform(0, math.pi / 2)
        nu = rng.uniform(0, 0.3)
        omega = rng.uniform(0.1, 10)
        t = rng.uniform(0.01, 10)
        out.append(model.ModelParams(theta, omega, model.DirectNu(nu), model.Temperature(t)))
    out.append(model.ModelParams(math.pi / 4, 1.0, model.DirectNu(0.1),
                                 model.Temperature(1 / math.log(2))))
    return out


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), estimation.QFI_FLOOR)


def check_normalization(params_list) -> Check:
    worst = 0.0
    for p in params_list:
        # looked up at call time so a patched formula is what gets checked
        alpha = model.state_coefficients(p.theta, p.nu, p.omega, p.temperature).alpha
        norm = model.normalization_norm(p.theta, p.nu, p.omega, p.acceleration)
        worst = max(worst, abs(alpha * norm - 1.0))
    return Check("normalization_consistency", worst <= 1e-12, worst, 1e-12)


def check_eigensystem(params_list) -> Check:
    worst = 0.0
    for p in params_list:
        exact = spectral.model_spectrum(p).eigenvalues
        numeric = spectral.numeric_eigensystem(model.evolved_state(p)).eigenvalues
        worst = max(worst, float(np.max(np.abs(exact - numeric))))
    return Check("eigensystem_oracle", worst <= 1e-10, worst, 1e-10)


def check_sld_route(params_list) -> Check:
    worst = max(_rel(estimation.qfi_closed(p), estimation.qfi_sld(p)) for p in params_list)
    return Check("qfi_closed_vs_sld", worst <= 1e-8, worst, 1e-8)


def check_fidelity_route(params_list) -> Check:
    worst = max(_rel(estimation.qfi_closed(p),
                     estimation.qfi_fidelity_oracle(p, 1e-4 * p.temperature))
                for p in params_list)
    return Check("qfi_closed_vs_fidelity", worst <= 1e-3, worst, 1e-3)


def check_optimal_measurement(params_list) -> Check:
    worst = 0.0
    for p in params_list:
        cfi = estimation.classical_fi(p, estimation.optimal_povm(p))
        worst = max(worst, _rel(estimation.qfi_closed(p), cfi))
    return Check("optimal_povm_attains_qfi", worst <= 1e-6, worst, 1e-6)


def check_random_measurements(params_list, seed: int = SEED) -> Check:
    rng = np.random.default_rng(seed + 1)
    worst = -math.inf
    for p in params_list:
        q = estimation.qfi_closed(p)
        step = estimation.default_cfi_step(p)
        for _ in range(N_RANDOM_POVMS):
            povm = estimation.random_projective_povm(rng)
            worst = max(worst, estimation.classical_fi(p, povm, step) - q)
    return Check("random_povm_below_qfi", worst <= 1e-9, worst, 1e-9)


_CHECKS = (
    ("normalization_consistency", 1e-12, check_normalization),
    ("eigensystem_oracle", 1e-10, check_eigensystem),
    ("qfi_closed_vs_sld", 1e-8, check_sld_route),
    ("qfi_closed_vs_fidelity", 1e-3, check_fidelity_route),
    ("optimal_povm_attains_qfi", 1e-6, check_optimal_measurement),
    ("random_povm_below_qfi", 1e-9, check_random_measurements),
)


def run_checks() -> list[Check]:
    params_list = parameter_set()
    out = []
    for name, tol, fn in _CHECKS:
        try:
            out.append(fn(params_list))
        except MetrologyError:
            # a broken model can fail validation before any comparison is made
            out.append(Check(name, False, math.inf, tol))
    return out


def report(checks) -> str:
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
