import math

import mpmath as mp
import numpy as np
import pytest

from unruh_metrology import precise
from unruh_metrology.errors import InvalidPovm, StepTooLarge
from unruh_metrology.estimation import (
    Povm,
    _mp_state,
    classical_fi,
    cramer_rao,
    default_cfi_step,
    fisher_report,
    optimal_povm,
    qfi_closed,
    qfi_fidelity_oracle,
    qfi_sld,
    random_projective_povm,
)
from unruh_metrology.model import DirectNu, ModelParams, Temperature, evolved_state
from unruh_metrology.spectral import numeric_eigensystem, sld, state_derivative

T_HALF = 1 / math.log(2)
REF = ModelParams(math.pi / 4, 1.0, DirectNu(0.1), Temperature(T_HALF))
# d/dT of the coefficients by mpmath numerical differentiation at 50 digits
REF_QFI = 6.7330871532157e-3


def random_params(rng, n):
    return [ModelParams(rng.uniform(0, math.pi / 2), rng.uniform(0.1, 10),
                        DirectNu(rng.uniform(0, 0.3)), Temperature(rng.uniform(0.01, 10)))
            for _ in range(n)]


def rel(a, b):
    return abs(a - b) / max(abs(a), 1e-12)


def binary_fisher_oracle(nu, omega, t):
    """Fisher information of {alpha, gamma} at theta = 0, differentiated by mpmath."""
    with mp.workdps(40):
        def alpha(temp):
            e = mp.exp(-mp.mpf(omega) / temp)
            return (1 - e) / ((1 - e) + mp.mpf(nu) ** 2 * e)
        t = mp.mpf(t)
        a = alpha(t)
        da = mp.diff(alpha, t)
        return float(da ** 2 / a + da ** 2 / (1 - a))


def test_no_coupling_gives_zero():
    p = ModelParams(0.5, 1.0, DirectNu(0.0), Temperature(1.0))
    assert qfi_closed(p) == 0.0
    assert qfi_sld(p) == 0.0
    assert abs(qfi_fidelity_oracle(p, 1e-4)) < 1e-10


def test_reference_point_routes():
    q = qfi_closed(REF)
    assert q == pytest.approx(6.73e-3, abs=5e-6)
    assert q == pytest.approx(REF_QFI, rel=1e-12)
    assert rel(q, qfi_sld(REF)) < 1e-8
    assert rel(q, qfi_sld(REF, numeric=True)) < 1e-8
    assert rel(q, qfi_fidelity_oracle(REF, 1e-4)) < 1e-4
    report = fisher_report(REF)
    assert report.max_rel_disagreement < 1e-3


@pytest.mark.parametrize("nu,omega,t", [(0.1, 1.0, 0.7), (0.25, 3.0, 2.0), (0.05, 0.3, 0.05)])
def test_product_probe_is_binary_distribution(nu, omega, t):
    p = ModelParams(0.0, omega, DirectNu(nu), Temperature(t))
    assert qfi_closed(p) == pytest.approx(binary_fisher_oracle(nu, omega, t), rel=1e-10)


def test_sld_trace_forms_agree():
    rng = np.random.default_rng(2)
    for p in random_params(rng, 100):
        rho = evolved_state(p).data
        drho = state_derivative(p)
        L = sld(numeric_eigensystem(rho), drho)
        a = np.trace(rho @ L @ L).real
        b = np.trace(drho @ L).real
        assert rel(a, b) < 1e-8 or abs(a - b) < 1e-20


def test_fidelity_oracle_converges_quadratically():
    errors = [abs(qfi_fidelity_oracle(REF, h * T_HALF) - REF_QFI) for h in (1e-2, 5e-3, 2.5e-3)]
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)
    assert errors[1] / errors[2] == pytest.approx(4.0, rel=0.05)


def test_fidelity_oracle_rejects_large_step():
    with pytest.raises(StepTooLarge):
        qfi_fidelity_oracle(REF, 0.2 * T_HALF)


def test_route_agreement_on_random_draws():
    rng = np.random.default_rng(17)
    for p in random_params(rng, 150):
        q = qfi_closed(p)
        assert rel(q, qfi_sld(p)) < 1e-8
        assert rel(q, qfi_fidelity_oracle(p, 1e-4 * p.temperature)) < 1e-3


def test_routes_invariant_under_fixed_unitary():
    # H on the first qubit, phase gate on the second; exact in 60-digit arithmetic
    with mp.workdps(precise.DPS):
        r = 1 / mp.sqrt(2)
        hadamard = mp.matrix([[r, r], [r, -r]])
        phase = mp.matrix([[1, 0], [0, mp.mpc(0, 1)]])
        u = mp.matrix(4, 4)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    for m in range(2):
                        u[2 * i + k, 2 * j + m] = hadamard[i, j] * phase[k, m]
        u_np = np.array(u.tolist(), dtype=complex)
    rng = np.random.default_rng(23)
    for p in [REF, *random_params(rng, 20)]:
        rho = evolved_state(p).data
        drho = state_derivative(p)
        base = np.trace(rho @ np.linalg.matrix_power(sld(numeric_eigensystem(rho), drho), 2)).real
        rho_u = u_np @ rho @ u_np.conj().T
        drho_u = u_np @ drho @ u_np.conj().T
        L_u = sld(numeric_eigensystem(rho_u), drho_u)
        assert abs(np.trace(rho_u @ L_u @ L_u).real - base) < 1e-10

        h = 1e-4 * p.temperature
        with mp.workdps(precise.DPS):
            lo = _mp_state(p.theta, p.nu, p.omega, mp.mpf(p.temperature) - mp.mpf(h) / 2)
            hi = _mp_state(p.theta, p.nu, p.omega, mp.mpf(p.temperature) + mp.mpf(h) / 2)
            plain = precise.root_fidelity(lo, hi)
            rotated = precise.root_fidelity(u * lo * u.H, u * hi * u.H)
            diff = abs(8 * (plain - rotated) / mp.mpf(h) ** 2)
        assert diff < 1e-10


def test_optimal_povm_structure():
    povm = optimal_povm(REF)
    r = 1 / math.sqrt(2)
    expected = [np.array(v, dtype=float) for v in
                ([0, r, r, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, r, -r, 0])]
    for vec in expected:
        proj = np.outer(vec, vec)
        assert any(np.allclose(proj, e, atol=1e-14) for e in povm.elements)
    np.testing.assert_allclose(sum(povm.elements), np.eye(4), atol=1e-12)


def test_optimal_povm_top_projector_pi_over_6():
    p = ModelParams(math.pi / 6, 1.0, DirectNu(0.1), Temperature(1.0))
    vec = np.array([0, 1, math.sqrt(3), 0]) / 2
    np.testing.assert_allclose(optimal_povm(p).elements[0], np.outer(vec, vec), atol=1e-15)


def test_classical_fi_of_optimal_povm_equals_qfi():
    rng = np.random.default_rng(29)
    for p in [REF, *random_params(rng, 50)]:
        q = qfi_closed(p)
        povm = optimal_povm(p)
        assert rel(q, classical_fi(p, povm)) < 1e-6
    # the finite-difference path reaches the same value away from extreme Omega/T
    assert rel(REF_QFI, classical_fi(REF, optimal_povm(REF), default_cfi_step(REF))) < 1e-6


def test_trivial_measurement_carries_no_information():
    povm = Povm((np.eye(4),))
    assert classical_fi(REF, povm) == 0.0
    # finite differences of a unit trace leave only rounding noise
    assert classical_fi(REF, povm, default_cfi_step(REF)) < 1e-20


def test_random_projective_measurements_never_beat_qfi():
    rng = np.random.default_rng(37)
    q = qfi_closed(REF)
    step = default_cfi_step(REF)
    values = [classical_fi(REF, random_projective_povm(rng), step) for _ in range(100)]
    assert max(values) <= q + 1e-9
    assert min(values) >= 0.0


def test_random_povm_is_valid_and_seeded():
    a = random_projective_povm(np.random.default_rng(1))
    b = random_projective_povm(np.random.default_rng(1))
    for x, y in zip(a.elements, b.elements):
        assert x.tobytes() == y.tobytes()


@pytest.mark.parametrize("elements", [
    (np.eye(4) / 2,),
    (np.diag([1.0, 1.0, 1.0, -1.0]), np.diag([0.0, 0.0, 0.0, 2.0])),
    (),
])
def test_invalid_povm(elements):
    with pytest.raises(InvalidPovm):
        Povm(elements)


def test_cramer_rao():
    assert cramer_rao(4.0, 1).variance_bound == 0.25
    assert cramer_rao(4.0, 100).variance_bound == 0.0025
    assert cramer_rao(0.0, 10).variance_bound == math.inf
    q = 3.7e-3
    for n in (1, 2, 7, 1000):
        assert cramer_rao(q, n).variance_bound == 1.0 / (n * q)
