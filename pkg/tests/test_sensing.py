import math

import numpy as np
import pytest

from omp_lab import (
    ContractViolation,
    EnumerationBudgetError,
    MatrixSpec,
    boundedness_probability,
    check_rip_premise,
    generate,
    rip_delta_exact,
    rip_delta_lower_bound,
    rip_delta_upper_bound,
)
from omp_lab.sensing import check_rip_order, rip_interval
from oracles import brute_delta


def test_orthogonal_is_orthonormal():
    for seed in (0, 1, 2**63 + 5):
        q = generate(MatrixSpec("orthogonal", 16, 16, seed))
        np.testing.assert_allclose(q.T @ q, np.eye(16), atol=1e-10)


def test_bernoulli_entries():
    b = generate(MatrixSpec("bernoulli", 4, 10, 3))
    assert set(np.unique(b)) <= {0.5, -0.5}
    assert set(np.unique(b)) == {0.5, -0.5}


def test_gaussian_column_norms_concentrate():
    g = generate(MatrixSpec("gaussian", 50, 100, 12345))
    assert 0.8 <= np.mean(np.linalg.norm(g, axis=0)) <= 1.2
    assert abs(np.mean(g)) < 0.02
    assert np.var(g) * 50 == pytest.approx(1.0, abs=0.05)


def test_generate_deterministic_and_seed_sensitive():
    a = generate(MatrixSpec("gaussian", 8, 12, 99))
    assert a.tobytes() == generate(MatrixSpec("gaussian", 8, 12, 99)).tobytes()
    assert not np.array_equal(a, generate(MatrixSpec("gaussian", 8, 12, 100)))


def test_generate_pinned_values():
    # frozen test vector for the documented PCG64 + Box-Muller pipeline
    g = generate(MatrixSpec("gaussian", 2, 3, 42))
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(42)))
    u = rng.random(6).reshape(3, 2)
    rad = np.sqrt(-2 * np.log(1 - u[:, 0]))
    z = np.column_stack([rad * np.cos(2 * np.pi * u[:, 1]), rad * np.sin(2 * np.pi * u[:, 1])]).reshape(-1)
    np.testing.assert_allclose(g.reshape(-1), z / np.sqrt(2), rtol=1e-15)


@pytest.mark.parametrize("spec", [
    dict(ensemble="orthogonal", rows=3, cols=4),
    dict(ensemble="gaussian", rows=5, cols=4),
    dict(ensemble="uniform", rows=2, cols=4),
    dict(ensemble="gaussian", rows=0, cols=4),
    dict(ensemble="gaussian", rows=2, cols=4, seed=-1),
])
def test_invalid_specs(spec):
    with pytest.raises(ContractViolation):
        MatrixSpec(**spec)


def test_exact_orthogonal_is_zero(backend):
    q = generate(MatrixSpec("orthogonal", 10, 10, 4))
    for k in (1, 3, 5, 10):
        est = rip_delta_exact(q, k)
        assert est.delta == pytest.approx(0.0, abs=1e-12)
        assert est.supports_examined == math.comb(10, k)
        assert est.method == "exact"


def test_exact_duplicated_columns(backend):
    col = np.array([0.6, 0.8, 0.0])
    phi = np.column_stack([col, col, [0.0, 0.0, 1.0]])
    assert rip_delta_exact(phi, 2).delta == pytest.approx(1.0, abs=1e-12)


def test_exact_matches_closed_form_pairs(backend):
    phi = generate(MatrixSpec("gaussian", 8, 12, 21))
    est = rip_delta_exact(phi, 2)
    assert est.supports_examined == 66
    assert est.delta == pytest.approx(brute_delta(phi, 2), abs=1e-10)


def test_exact_matches_cubic_oracle(backend):
    phi = generate(MatrixSpec("gaussian", 8, 12, 22))
    assert rip_delta_exact(phi, 3).delta == pytest.approx(brute_delta(phi, 3), abs=1e-9)


def test_budget_error():
    phi = generate(MatrixSpec("gaussian", 8, 40, 1))
    with pytest.raises(EnumerationBudgetError, match="Monte-Carlo"):
        rip_delta_exact(phi, 10)
    with pytest.raises(EnumerationBudgetError):
        rip_delta_exact(phi, 2, budget=10)


def test_monotone_in_k(backend):
    for seed in range(5):
        phi = generate(MatrixSpec("gaussian", 5, 8, seed))
        deltas = [rip_delta_exact(phi, k).delta for k in range(1, 9)]
        assert all(a <= b + 1e-8 for a, b in zip(deltas, deltas[1:]))


def test_maximising_support_realises_delta(backend):
    for seed in range(5):
        phi = generate(MatrixSpec("gaussian", 6, 9, seed))
        est = rip_delta_exact(phi, 3)
        sub = phi[:, list(est.support)]
        w, v = np.linalg.eigh(sub.T @ sub)
        best = max(abs(np.linalg.norm(sub @ v[:, i]) ** 2 - 1.0) for i in range(3))
        assert best >= est.delta - 1e-6


def test_lower_bound_full_coverage_is_exact(backend):
    phi = generate(MatrixSpec("gaussian", 5, 7, 8))
    exact = rip_delta_exact(phi, 3)
    lb = rip_delta_lower_bound(phi, 3, samples=35, seed=1)
    assert lb.delta == pytest.approx(exact.delta, abs=1e-12)
    assert lb.method == "monte_carlo_lower_bound" and lb.seed == 1


def test_lower_bound_dominated_by_exact(backend):
    rng = np.random.default_rng(0)
    for trial in range(50):
        phi = generate(MatrixSpec("gaussian", 8, 12, trial))
        k = int(rng.integers(1, 4))
        exact = rip_delta_exact(phi, k).delta
        lb = rip_delta_lower_bound(phi, k, samples=30, seed=trial)
        assert lb.delta <= exact + 1e-8
        assert rip_delta_upper_bound(phi, k).delta >= exact - 1e-8


def test_lower_bound_deterministic_and_orthogonal():
    phi = generate(MatrixSpec("gaussian", 8, 12, 3))
    a = rip_delta_lower_bound(phi, 3, 30, 17)
    b = rip_delta_lower_bound(phi, 3, 30, 17)
    assert a == b
    q = generate(MatrixSpec("orthogonal", 12, 12, 3))
    assert rip_delta_lower_bound(q, 4, 20, 5).delta == pytest.approx(0.0, abs=1e-12)


def test_interval_falls_back_to_bounds():
    phi = generate(MatrixSpec("gaussian", 10, 40, 2))
    lo, hi = rip_interval(phi, 12, use_exact=True, samples=200, seed=0)
    assert lo.method == "monte_carlo_lower_bound" and hi.method == "upper_bound"
    assert lo.delta <= hi.delta


def test_premise_orthogonal_holds():
    q = generate(MatrixSpec("orthogonal", 64, 64, 9))
    rep = check_rip_premise(q, 1, 1.0)
    assert rep.premise_status == "holds" and rep.holds
    assert rep.context["alpha"] == 31
    assert rep.lhs == pytest.approx(0.0, abs=1e-9)


def test_premise_duplicated_columns_refuted():
    rng = np.random.default_rng(1)
    phi = rng.standard_normal((6, 70))
    phi /= np.linalg.norm(phi, axis=0)
    phi[:, 1] = phi[:, 0]
    rep = check_rip_premise(phi, 2, 0.5, samples=50, seed=3)
    assert rep.premise_status == "refuted" and not rep.holds
    assert rep.context["delta_k"]["lower"] == pytest.approx(1.0, abs=1e-9)


def test_premise_undefined_when_order_exceeds_n():
    q = generate(MatrixSpec("orthogonal", 20, 20, 1))
    rep = check_rip_premise(q, 1, 0.5)
    assert rep.premise_status == "premise_undefined"
    assert rep.to_dict()["lhs"] is None


def test_premise_gaussian_inconclusive_or_refuted():
    phi = generate(MatrixSpec("gaussian", 32, 48, 5))
    rep = check_rip_premise(phi, 1, 1.0, samples=200, seed=0)
    assert rep.premise_status in ("refuted", "inconclusive")
    assert rep.context["delta_k"]["lower_method"] == "exact"
    assert rep.context["delta_alpha_k"]["lower_method"] == "monte_carlo_lower_bound"


def test_check_rip_order():
    q = generate(MatrixSpec("orthogonal", 8, 8, 1))
    assert check_rip_order(q, 4, 0.1).premise_status == "holds"
    col = np.array([1.0, 0.0])
    assert check_rip_order(np.column_stack([col, col]), 2, 0.5).premise_status == "refuted"


def test_boundedness_examples():
    x = np.random.default_rng(2).standard_normal(16)
    assert boundedness_probability(MatrixSpec("orthogonal", 16, 16), x, 1 + 1e-9, 50, 1) == 1.0
    for ens in ("gaussian", "bernoulli"):
        assert boundedness_probability(MatrixSpec(ens, 4, 16), x, 1e6, 100, 2) == 1.0
    u = np.zeros(100)
    u[3] = 1.0
    assert boundedness_probability(MatrixSpec("gaussian", 50, 100), u, 2.0, 1000, 3) >= 0.99


def test_boundedness_chi2_tail():
    # ||phi u||^2 ~ chi2_n / n for gaussian phi and unit u
    from scipy.stats import chi2

    u = np.zeros(20)
    u[0] = 1.0
    frac = boundedness_probability(MatrixSpec("gaussian", 5, 20), u, 1.2, 2000, 7)
    assert frac == pytest.approx(chi2.cdf(6.0, 5), abs=0.035)


def test_boundedness_rejects_zero():
    with pytest.raises(ContractViolation):
        boundedness_probability(MatrixSpec("gaussian", 4, 8), np.zeros(8), 2.0, 10, 0)
