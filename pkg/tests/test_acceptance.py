"""Release acceptance suite; one test per numbered criterion, each with its runtime budget."""
import io
import math
import time

import numpy as np
import pytest

from unruh_metrology import cli
from unruh_metrology.entanglement import state_concurrence
from unruh_metrology.estimation import (
    classical_fi,
    optimal_povm,
    qfi_closed,
    qfi_fidelity_oracle,
    qfi_sld,
    random_projective_povm,
)
from unruh_metrology.explore import FIG3_DELTAS, figure_data, sign_changes
from unruh_metrology.model import (
    DirectNu,
    ModelParams,
    Temperature,
    evolved_state,
    normalization_norm,
    state_coefficients,
)
from unruh_metrology.spectral import model_spectrum, numeric_eigensystems

SEED = 8675309


def draws(n, seed=SEED):
    rng = np.random.default_rng(seed)
    th = rng.uniform(0, math.pi / 2, n)
    nu = rng.uniform(0, 0.3, n)
    om = rng.uniform(0.1, 10, n)
    t = rng.uniform(0.01, 10, n)
    return [ModelParams(*args[:2], DirectNu(args[2]), Temperature(args[3]))
            for args in zip(th, om, nu, t)]


def rel(a, b):
    return abs(a - b) / max(abs(a), 1e-300)


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f} s, budget {self.seconds} s"


@pytest.mark.criterion(1, "state validity on 1e4 draws")
def test_state_validity():
    with Budget(5):
        worst = 0.0
        for p in draws(10_000):
            rho = evolved_state(p).data
            c = state_coefficients(p.theta, p.nu, p.omega, p.temperature)
            worst = max(
                worst,
                np.max(np.abs(rho - rho.conj().T)),
                abs(np.trace(rho).real - 1),
                -np.linalg.eigvalsh(rho)[0],
                abs(sum(c) - 1),
                abs(c.alpha * normalization_norm(p.theta, p.nu, p.omega, p.acceleration) - 1),
            )
    print(f"criterion 1 worst deviation {worst:.3e}")
    assert worst <= 1e-12


@pytest.mark.criterion(2, "closed-form spectrum vs numeric eigensolver")
def test_spectrum_oracle():
    params = draws(10_000)
    with Budget(5):
        stack = np.array([evolved_state(p).data for p in params])
        numeric = numeric_eigensystems(stack)
        worst = max(np.max(np.abs(model_spectrum(p).eigenvalues - num.eigenvalues))
                    for p, num in zip(params, numeric))
    print(f"criterion 2 worst eigenvalue gap {worst:.3e}")
    assert worst <= 1e-10


@pytest.mark.criterion(3, "QFI route agreement and oracle convergence order")
def test_qfi_routes():
    with Budget(10):
        worst_sld = worst_fid = 0.0
        for p in draws(1_000):
            q = qfi_closed(p)
            if q == 0.0:
                assert qfi_sld(p) == 0.0
                continue
            worst_sld = max(worst_sld, rel(q, qfi_sld(p)))
            worst_fid = max(worst_fid, rel(q, qfi_fidelity_oracle(p, 1e-4 * p.temperature)))
        ref = ModelParams(math.pi / 4, 1.0, DirectNu(0.1), Temperature(1 / math.log(2)))
        q = qfi_closed(ref)
        errs = [abs(qfi_fidelity_oracle(ref, h * ref.temperature) - q) for h in (1e-2, 5e-3)]
        order = math.log2(errs[0] / errs[1])
    print(f"criterion 3 sld {worst_sld:.3e} fidelity {worst_fid:.3e} order {order:.3f}")
    assert worst_sld <= 1e-8
    assert worst_fid <= 1e-3
    assert order == pytest.approx(2.0, abs=0.1)


@pytest.mark.criterion(4, "eigenbasis measurement is optimal")
def test_measurement_optimality():
    rng = np.random.default_rng(SEED + 4)
    with Budget(20):
        worst_opt = 0.0
        for p in draws(100, SEED + 1):
            q = qfi_closed(p)
            cfi = classical_fi(p, optimal_povm(p))
            worst_opt = max(worst_opt, 0.0 if q == cfi else rel(q, cfi))
        worst_excess = -math.inf
        for p in draws(20, SEED + 2):
            q = qfi_closed(p)
            for _ in range(100):
                worst_excess = max(worst_excess,
                                   classical_fi(p, random_projective_povm(rng)) - q)
    print(f"criterion 4 optimal {worst_opt:.3e} random excess {worst_excess:.3e}")
    assert worst_opt <= 1e-6
    assert worst_excess <= 1e-9


@pytest.mark.criterion(5, "fig1 shape: increasing in nu, single interior peak in a")
def test_figure1_shape():
    with Budget(2):
        recs = figure_data("fig1")
    q = np.array([r.qfi for r in recs]).reshape(20, 60)
    assert np.all(np.diff(q, axis=0) > 0)
    for row in q:
        assert sign_changes(row) == 1
        assert 0 < int(np.argmax(row)) < row.size - 1


@pytest.mark.criterion(6, "fig2 shape: concurrence falls, QFI peaks at finite a")
def test_figure2_shape():
    with Budget(2):
        recs = figure_data("fig2")
    c = np.array([r.concurrence for r in recs])
    q = np.array([r.qfi for r in recs])
    assert np.all(np.diff(c) < 0)
    assert sign_changes(q) == 1
    assert 0 < int(np.argmax(q)) < q.size - 1


@pytest.mark.criterion(7, "fig3 shape: interior peak in omega, rising with delta")
def test_figure3_shape():
    with Budget(2):
        recs = figure_data("fig3")
    peaks = []
    for delta in FIG3_DELTAS:
        q = np.array([r.qfi for r in recs if r.coordinates["delta"] == delta])
        k = int(np.argmax(q))
        print(f"criterion 7 delta={delta} argmax index {k} of {q.size}, peak {q[k]:.6e}")
        peaks.append(q[k])
        assert 0 < k < q.size - 1, f"delta={delta}: maximum sits at grid index {k}"
    assert peaks[0] < peaks[1] < peaks[2]


@pytest.mark.criterion(8, "no-coupling and weak-coupling limits")
def test_limits():
    with Budget(1):
        for theta in np.linspace(0, math.pi / 2, 11):
            for t in (0.05, 1.0, 7.0):
                p = ModelParams(theta, 1.0, DirectNu(0.0), Temperature(t))
                assert qfi_closed(p) == 0.0
                assert state_concurrence(evolved_state(p)) == pytest.approx(
                    math.sin(2 * theta), abs=1e-15)
                weak = ModelParams(theta, 1.0, DirectNu(1e-6), Temperature(t))
                assert qfi_closed(weak) < 1e-8


def run_cli(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out, io.StringIO())
    assert code == 0
    return out.getvalue()


@pytest.mark.criterion(9, "byte-identical output across runs and worker counts")
def test_determinism():
    with Budget(10):
        assert run_cli("selftest") == run_cli("selftest")
        for fig in ("fig1", "fig2", "fig3"):
            for fmt in ("csv", "json"):
                outputs = {run_cli("figure", fig, "--format", fmt, "--workers", w)
                           for w in ("1", "1", "4")}
                assert len(outputs) == 1, f"{fig} {fmt} output varies"
