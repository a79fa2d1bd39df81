"""Acceptance criteria, each at its stated tolerance and runtime bound.

Every test records a one-line PASS/FAIL verdict that is printed in the
terminal summary.
"""

import copy
import itertools
import math
import time

import numpy as np
import pytest

from omp_lab import (
    MatrixSpec, OmpOptions, alpha_of, generate, io, omp_decode, rip_delta_exact,
    rip_delta_lower_bound, run_experiment, run_verification,
)
from omp_lab.constants import c0_constant, c1_constant, c2_constant
from oracles import brute_delta

pytestmark = pytest.mark.acceptance

PILOT_SEED = 20240611

RECOVERY_CONFIG = {
    "matrix": {"ensemble": "gaussian", "rows": 64, "cols": 256},
    "signal": {"k": 8, "magnitude": "unit"},
    "trials": 200,
    "decoder": {"kind": "omp", "iters": 8},
    "metrics": [{"name": "success", "tol": 1e-6}, "l2"],
    "master_seed": PILOT_SEED,
}


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_1_recovery_rate(record):
    rep, secs = _timed(lambda: run_experiment(RECOVERY_CONFIG))
    rate = rep["aggregates"]["success_rate"]
    ok = rate >= 0.90 and secs < 10
    record("1. gaussian 64x256 k=8 recovery rate >= 0.90", ok, f"rate={rate:.3f} time={secs:.2f}s")
    assert secs < 10
    assert rate >= 0.90


def test_2_theorem1_orthogonal(record):
    cfg = {
        "matrix": {"ensemble": "orthogonal", "rows": 128, "cols": 128, "seed": 2024},
        "k": [1, 2], "pq": [[1, 2], [1, 1], [1.5, 2]], "noise_l2": [0, 0.01],
        "delta": 1, "trials": 100, "seed": 11, "signal": "dense",
    }
    rep, secs = _timed(lambda: run_verification("theorem1", cfg))
    s = rep["summary"]
    ok = s["holds"] == 100 and s["total"] == 100 and secs < 30
    record("2. theorem 1 bound on orthogonal N=128", ok,
           f"holds={s['holds']}/{s['total']} premise={s['premise_status']} time={secs:.2f}s")
    assert s["premise_status"] == {"holds": 100}
    assert s["holds"] == 100 and secs < 30


def test_3_theorem2_orthogonal(record):
    cfg = {
        "matrix": {"ensemble": "orthogonal", "rows": 128, "cols": 128, "seed": 7},
        "k": [1, 2], "delta": 1, "C": 1, "trials": 100, "seed": 12, "signal": "dense",
    }
    rep, secs = _timed(lambda: run_verification("theorem2", cfg))
    s = rep["summary"]
    ok = s["holds"] == 100 and secs < 10
    record("3. theorem 2 bound on orthogonal, C=1", ok, f"holds={s['holds']}/{s['total']} time={secs:.2f}s")
    assert s["holds"] == 100 and secs < 10


def test_4_lemma2_and_holder(record):
    (a, b), secs = _timed(lambda: (run_verification("lemma2", {"draws": 1000, "seed": 3}),
                                   run_verification("holder", {"draws": 1000, "seed": 4})))
    va, vb = a["summary"]["violations"], b["summary"]["violations"]
    totals = (a["summary"]["total"], b["summary"]["total"])
    ok = va == 0 and vb == 0 and totals == (1000, 1000) and secs < 1
    record("4. lemma 2 / hoelder property suites", ok,
           f"violations={va}+{vb} draws={totals} time={secs:.2f}s")
    assert totals == (1000, 1000)
    assert va == 0 and vb == 0
    assert secs < 1


def test_5_lemma1_exact_delta(record):
    cfg = {"matrix": {"ensemble": "gaussian", "rows": 6, "cols": 9}, "matrices": 20, "k": 1,
           "p": [1, 1.5], "z_per_matrix": 500, "seed": 5}
    rep, secs = _timed(lambda: run_verification("lemma1", cfg))
    s = rep["summary"]
    ok = s["total"] == 20 * 2 * 500 and s["violations"] == 0 and secs < 30
    record("5. lemma 1 with exact delta_L", ok, f"violations={s['violations']}/{s['total']} time={secs:.2f}s")
    assert s["total"] == 20000
    assert s["violations"] == 0 and secs < 30


def test_6_rip_oracle(record):
    def run():
        worst, mc_ok = 0.0, True
        for m in range(20):
            phi = generate(MatrixSpec("gaussian", 8, 12, 900 + m))
            for k in (1, 2, 3):
                exact = rip_delta_exact(phi, k).delta
                worst = max(worst, abs(exact - brute_delta(phi, k)))
                mc = rip_delta_lower_bound(phi, k, 30, seed=m).delta
                mc_ok &= mc <= exact + 1e-12
        return worst, mc_ok

    (worst, mc_ok), secs = _timed(run)
    ok = worst <= 1e-7 and mc_ok and secs < 20
    record("6. exact RIP vs closed-form brute force", ok,
           f"max|diff|={worst:.2e} mc<=exact={mc_ok} time={secs:.2f}s")
    assert worst <= 1e-7 and mc_ok and secs < 20


def test_7_constants(record):
    c2_ref = 4.0 * (math.sqrt(31.0) + 1.0) + 3.0  # 16+15*1 = 31
    errs = [
        abs(c2_constant(1.0) - c2_ref),
        abs(c2_constant(1.0) - 29.2711),  # printed to 4 decimals
        abs(c2_constant(1.0) - (c1_constant(1.0, 2.0) + 2.0)),
        abs(c0_constant(1.0, 2.0) - c2_constant(1.0)),
    ]
    for d in (0.01, 0.1, 0.5, 0.9):
        errs.append(abs(c2_constant(d) - (c1_constant(d, 2.0) + 2.0)))
    ok = alpha_of(1) == 31 and alpha_of(0.1) == 18 and max(errs[:1] + errs[2:]) <= 1e-12 and errs[1] < 5e-5
    record("7. constant calculators", ok,
           f"alpha(1)={alpha_of(1)} alpha(0.1)={alpha_of(0.1)} C2(1)={c2_constant(1.0):.12f}")
    assert alpha_of(1) == 31 and alpha_of(0.1) == 18
    assert errs[0] <= 1e-12 and errs[1] < 5e-5
    assert max(errs[2:]) <= 1e-12


def test_8_omp_trace_invariants(record):
    rng = np.random.default_rng(PILOT_SEED)
    bad = []
    for i in range(200):
        n = int(rng.integers(4, 40))
        N = int(rng.integers(n, 3 * n + 1))
        phi = rng.standard_normal((n, N)) / math.sqrt(n)
        y = rng.standard_normal(n) if i % 2 else phi[:, rng.choice(N, max(1, n // 4), replace=False)].sum(axis=1)
        M = int(rng.integers(1, n + 1))
        res = omp_decode(phi, y, OmpOptions(M, residual_stop_rel=0.0))
        norms = np.asarray(res.residual_norms)
        ynorm = np.linalg.norm(y)
        if np.any(np.diff(norms) > 1e-9 * max(1.0, ynorm)):
            bad.append((i, "residual increased"))
        if len(norms) != res.iterations_run + 1:
            bad.append((i, "trace length"))
        # rerunning with l iterations exposes iterate l
        for l in range(1, res.iterations_run + 1):
            part = omp_decode(phi, y, OmpOptions(l, residual_stop_rel=0.0))
            if part.chosen_order != res.chosen_order[:l] or len(set(part.chosen_order)) != l:
                bad.append((i, l, "support did not grow by one"))
            r = y - phi @ part.estimate
            if np.max(np.abs(phi[:, part.chosen_order].T @ r)) > 1e-8 * ynorm:
                bad.append((i, l, "residual not orthogonal"))
    ok = not bad
    record("8. OMP trace invariants on 200 instances", ok, f"failures={len(bad)}")
    assert not bad, bad[:5]


def test_9_determinism(record):
    def strip(rep):
        rep = copy.deepcopy(rep)
        rep.pop("created_at")
        return io.dumps(rep)

    a = strip(run_experiment(RECOVERY_CONFIG))
    b = strip(run_experiment(RECOVERY_CONFIG, workers=1))
    ok = a == b
    record("9. byte-identical recovery report", ok, f"bytes={len(a)}")
    assert ok
