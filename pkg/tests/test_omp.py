import numpy as np
import pytest

from omp_lab import ContractViolation, MatrixSpec, OmpOptions, generate, omp_decode
from omp_lab.signal import best_k_term


def _scratch_omp(phi, y, m):
    """Independent re-implementation: pinv-based update, no exclusions."""
    r = y.copy()
    chosen = []
    c = np.zeros(phi.shape[1])
    for _ in range(m):
        h = phi.T @ r
        chosen.append(int(np.argmax(np.abs(h))))
        c = np.zeros(phi.shape[1])
        c[chosen] = np.linalg.pinv(phi[:, chosen]) @ y
        r = y - phi @ c
    return c, chosen


def test_identity_matrix(backend):
    res = omp_decode(np.eye(4), np.array([0.0, 5.0, 0.0, -3.0]), 2)
    np.testing.assert_allclose(res.estimate, [0, 5, 0, -3])
    assert res.chosen_order == [1, 3]
    assert res.residual_norms[-1] == 0.0
    assert not res.stopped_early


def test_zero_measurements_stop_immediately():
    phi = generate(MatrixSpec("gaussian", 5, 9, 1))
    res = omp_decode(phi, np.zeros(5), 3)
    assert res.stopped_early and res.iterations_run == 0
    np.testing.assert_array_equal(res.estimate, 0.0)
    assert res.residual_norms == [0.0]


def test_gaussian_seed7_matches_scratch_oracle(backend):
    phi = generate(MatrixSpec("gaussian", 20, 40, 7))
    x = np.zeros(40)
    x[[3, 17, 29]] = [5.0, -2.0, 0.7]
    y = phi @ x
    res = omp_decode(phi, y, 3)
    oracle, chosen = _scratch_omp(phi, y, 3)
    assert res.chosen_order == chosen
    np.testing.assert_allclose(res.estimate, oracle, atol=1e-12)
    assert np.linalg.norm(res.estimate - x) <= 1e-8


def test_noisy_one_sparse_orthogonal(backend, rng):
    phi = generate(MatrixSpec("orthogonal", 64, 64, 11))
    for _ in range(20):
        i = int(rng.integers(64))
        x = np.zeros(64)
        x[i] = 10.0 * rng.choice([-1, 1])
        e = rng.standard_normal(64)
        e *= 0.1 / np.linalg.norm(e)
        res = omp_decode(phi, phi @ x + e, 1)
        assert res.chosen_order == [i]
        assert np.linalg.norm(res.estimate - x) <= 0.1 + 1e-12


def test_preconditions():
    with pytest.raises(ContractViolation):
        omp_decode(np.eye(3), np.ones(3), 4)
    with pytest.raises(ContractViolation):
        omp_decode(np.eye(3), np.ones(2), 1)
    with pytest.raises(ContractViolation):
        OmpOptions(0)
    with pytest.raises(ContractViolation):
        OmpOptions(2, -1.0)


def test_zero_correlation_stops_early():
    # y orthogonal to every column
    phi = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    res = omp_decode(phi, np.array([0.0, 0.0, 1.0]), 2)
    assert res.stopped_early and res.iterations_run == 0


def test_orthonormal_equivalence(backend, rng):
    phi = generate(MatrixSpec("orthogonal", 32, 32, 5))
    for _ in range(30):
        y = rng.standard_normal(32)
        m = int(rng.integers(1, 10))
        res = omp_decode(phi, y, m)
        target = best_k_term(phi.T @ y, m, 2.0)
        np.testing.assert_array_equal(res.selected, target.kept)
        np.testing.assert_allclose(res.estimate, target.approx, atol=1e-12)


def test_trace_invariants(backend, rng):
    for _ in range(50):
        n, N = int(rng.integers(4, 20)), int(rng.integers(20, 40))
        phi = rng.standard_normal((n, N)) / np.sqrt(n)
        y = rng.standard_normal(n)
        m = int(rng.integers(1, n + 1))
        res = omp_decode(phi, y, m)
        norms = res.residual_norms
        assert len(norms) == res.iterations_run + 1
        assert all(b <= a + 1e-9 for a, b in zip(norms, norms[1:]))
        assert len(set(res.chosen_order)) == res.iterations_run == len(res.selected)
        assert set(np.flatnonzero(res.estimate)) <= set(res.selected)


def test_determinism():
    phi = generate(MatrixSpec("gaussian", 16, 48, 2))
    y = generate(MatrixSpec("gaussian", 16, 16, 3))[:, 0]
    a = omp_decode(phi, y, 10)
    b = omp_decode(phi, y, 10)
    assert a.chosen_order == b.chosen_order
    assert a.residual_norms == b.residual_norms
    assert a.estimate.tobytes() == b.estimate.tobytes()


def test_to_dict_is_json_ready():
    import json

    res = omp_decode(np.eye(3), np.array([1.0, 0.0, 2.0]), 2)
    d = json.loads(json.dumps(res.to_dict()))
    assert d["chosen_order"] == [2, 0]
    assert d["iterations_run"] == 2
