"""Seeded trial batches and randomized verification suites.

Every trial ``t`` draws its matrix, signal and noise from substream ``t`` of
the master seed (see :mod:`omp_lab.seeding`), so a report depends only on
its config and never on how many workers ran the trials.
"""

from __future__ import annotations

import datetime as _dt
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from . import _backend
from .bounds import (
    check_holder,
    check_lemma2,
    lemma1_order,
    oracle_ls_decoder,
    verify_lemma1,
    verify_theorem1,
    verify_theorem2,
    verify_zhang,
)
from .errors import ContractViolation
from .omp import OmpOptions, omp_decode
from .reports import HOLDS, NOT_CHECKED, REFUTED, _jsonable
from .seeding import box_muller, check_seed, generator, substream, substream_seeds
from .sensing import MatrixSpec, check_rip_premise, generate, rip_delta_exact
from .signal import best_k_term, lp_norm, sigma_k

SCHEMA_VERSION = 1
MAGNITUDES = ("unit", "gaussian", "decaying", "zero")


def _field_error(name: str, message: str) -> ContractViolation:
    return ContractViolation(f"field '{name}': {message}")


def _get(d: dict, key: str, prefix: str, default: Any = ..., kind=None):
    if key not in d:
        if default is ...:
            raise _field_error(prefix + key, "missing")
        return default
    value = d[key]
    if kind is not None:
        try:
            if kind is int and (isinstance(value, bool) or float(value) != int(value)):
                raise ValueError
            value = kind(value)
        except (TypeError, ValueError):
            raise _field_error(prefix + key, f"expected {kind.__name__}, got {value!r}") from None
    return value


def parse_matrix_spec(d: Any, prefix: str = "matrix.") -> MatrixSpec:
    if not isinstance(d, dict):
        raise _field_error(prefix.rstrip("."), "expected an object")
    try:
        return MatrixSpec(
            ensemble=_get(d, "ensemble", prefix, kind=str),
            rows=_get(d, "rows", prefix, kind=int),
            cols=_get(d, "cols", prefix, kind=int),
            seed=_get(d, "seed", prefix, 0, int),
        )
    except ContractViolation as exc:
        if str(exc).startswith("field"):
            raise
        raise _field_error(prefix.rstrip("."), str(exc)) from None


# --------------------------------------------------------------------------
# experiment config


@dataclass(frozen=True)
class Metric:
    name: str
    q: float | None = None
    p: float | None = None
    tol: float | None = None

    @property
    def key(self) -> str:
        if self.name in ("l1", "l2", "success"):
            return self.name
        if self.name == "lq":
            return f"l{self.q:g}"
        return f"sigma_ratio(p={self.p:g},q={self.q:g})"

    def to_dict(self) -> dict:
        out = {"name": self.name}
        for attr in ("p", "q", "tol"):
            value = getattr(self, attr)
            if value is not None:
                out[attr] = value
        return out


def _parse_metric(item: Any, index: int) -> Metric:
    where = f"metrics[{index}]"
    if isinstance(item, str):
        item = {"name": item}
    if not isinstance(item, dict) or "name" not in item:
        raise _field_error(where, "expected a metric name or an object with 'name'")
    name = item["name"]
    prefix = where + "."
    if name in ("l1", "l2"):
        return Metric(name)
    if name == "lq":
        q = _get(item, "q", prefix, kind=float)
        if q < 1:
            raise _field_error(prefix + "q", "must be >= 1")
        return Metric(name, q=q)
    if name == "success":
        tol = _get(item, "tol", prefix, 1e-6, float)
        if tol < 0:
            raise _field_error(prefix + "tol", "must be >= 0")
        return Metric(name, tol=tol)
    if name == "sigma_ratio":
        p = _get(item, "p", prefix, kind=float)
        q = _get(item, "q", prefix, kind=float)
        if not 1 <= p <= q:
            raise _field_error(where, "need 1 <= p <= q")
        return Metric(name, p=p, q=q)
    raise _field_error(prefix + "name", f"unknown metric {name!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    matrix: MatrixSpec
    k: int
    magnitude: str = "unit"
    noise_l2: float = 0.0
    trials: int = 1
    decoder: str = "omp"
    iterations: int | None = None
    stop_rel: float = 1e-12
    metrics: tuple[Metric, ...] = (Metric("l2"),)
    master_seed: int = 0
    fixed_matrix: bool = False

    def to_dict(self) -> dict:
        decoder = {"kind": self.decoder}
        if self.decoder == "omp":
            decoder.update(iters=self.iterations, stop_rel=self.stop_rel)
        return {
            "matrix": {"ensemble": self.matrix.ensemble, "rows": self.matrix.rows,
                       "cols": self.matrix.cols, "seed": self.matrix.seed},
            "fixed_matrix": self.fixed_matrix,
            "signal": {"k": self.k, "magnitude": self.magnitude, "support": "uniform"},
            "noise_l2": self.noise_l2,
            "trials": self.trials,
            "decoder": decoder,
            "metrics": [m.to_dict() for m in self.metrics],
            "master_seed": self.master_seed,
        }


def parse_experiment_config(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ContractViolation("config must be a JSON object")
    matrix = parse_matrix_spec(_get(d, "matrix", ""))
    signal = _get(d, "signal", "")
    if not isinstance(signal, dict):
        raise _field_error("signal", "expected an object")
    k = _get(signal, "k", "signal.", kind=int)
    magnitude = _get(signal, "magnitude", "signal.", "unit", str)
    if magnitude not in MAGNITUDES:
        raise _field_error("signal.magnitude", f"must be one of {MAGNITUDES}")
    if _get(signal, "support", "signal.", "uniform", str) != "uniform":
        raise _field_error("signal.support", "only 'uniform' is supported")
    if not 0 <= k <= matrix.cols:
        raise _field_error("signal.k", f"must lie in [0, {matrix.cols}]")
    if magnitude == "decaying" and 2 * k > matrix.cols:
        raise _field_error("signal.k", "decaying signals need 2k <= cols")

    decoder = _get(d, "decoder", "", {"kind": "omp"})
    if not isinstance(decoder, dict):
        raise _field_error("decoder", "expected an object")
    kind = _get(decoder, "kind", "decoder.", "omp", str)
    iterations = None
    stop_rel = 1e-12
    if kind == "omp":
        iterations = _get(decoder, "iters", "decoder.", max(k, 1), int)
        if not 1 <= iterations <= matrix.cols:
            raise _field_error("decoder.iters", f"must lie in [1, {matrix.cols}]")
        stop_rel = _get(decoder, "stop_rel", "decoder.", 1e-12, float)
        if stop_rel < 0:
            raise _field_error("decoder.stop_rel", "must be >= 0")
    elif kind == "oracle":
        if k < 1:
            raise _field_error("signal.k", "oracle decoder needs k >= 1")
    else:
        raise _field_error("decoder.kind", f"must be 'omp' or 'oracle', got {kind!r}")

    noise = _get(d, "noise_l2", "", 0.0, float)
    if not noise >= 0 or not math.isfinite(noise):
        raise _field_error("noise_l2", "must be a finite number >= 0")
    trials = _get(d, "trials", "", 1, int)
    if trials < 1:
        raise _field_error("trials", "must be >= 1")
    raw_metrics = _get(d, "metrics", "", ["l2"])
    if not isinstance(raw_metrics, list) or not raw_metrics:
        raise _field_error("metrics", "expected a non-empty list")
    metrics = tuple(_parse_metric(m, i) for i, m in enumerate(raw_metrics))
    if sum(m.name == "success" for m in metrics) > 1:
        raise _field_error("metrics", "at most one success metric")
    if len({m.key for m in metrics}) != len(metrics):
        raise _field_error("metrics", "duplicate metric")
    try:
        master_seed = check_seed(_get(d, "master_seed", "", kind=int))
    except ValueError as exc:
        raise _field_error("master_seed", str(exc)) from None
    return ExperimentConfig(
        matrix=matrix, k=k, magnitude=magnitude, noise_l2=noise, trials=trials, decoder=kind,
        iterations=iterations, stop_rel=stop_rel, metrics=metrics, master_seed=master_seed,
        fixed_matrix=bool(_get(d, "fixed_matrix", "", False)),
    )


# --------------------------------------------------------------------------
# signal and noise models


def draw_signal(rng: np.random.Generator, N: int, k: int, magnitude: str) -> tuple[np.ndarray, np.ndarray]:
    """Draw a signal and its "head" support (the k positions an oracle knows).

    Draw order: N uniform keys fixing a uniformly random support (positions
    sorted by key), then either one uniform per position for the sign
    (``unit``, ``decaying``) or one Box-Muller normal per position
    (``gaussian``). ``decaying`` uses a support of size 2k with the i-th
    position carrying magnitude 1/i.
    """
    size = 2 * k if magnitude == "decaying" else k
    order = np.argsort(rng.random(N), kind="stable")[:size]
    x = np.zeros(N)
    if magnitude == "gaussian":
        x[order] = box_muller(rng, size)
    elif magnitude in ("unit", "decaying"):
        signs = np.where(rng.random(size) < 0.5, 1.0, -1.0)
        mags = 1.0 / np.arange(1, size + 1) if magnitude == "decaying" else np.ones(size)
        x[order] = signs * mags
    return x, np.sort(order[:k])


def draw_noise(rng: np.random.Generator, n: int, eps: float) -> np.ndarray:
    """Noise of exact l2 norm ``eps`` in a uniformly random direction."""
    if eps == 0.0:
        return np.zeros(n)
    g = box_muller(rng, n)
    return eps * g / np.linalg.norm(g)


# --------------------------------------------------------------------------
# experiments


def _run_trial(config: ExperimentConfig, t: int, fixed_phi: np.ndarray | None) -> dict:
    matrix_seed, signal_seed, noise_seed = substream_seeds(config.master_seed, t)
    phi = fixed_phi if fixed_phi is not None else generate(replace(config.matrix, seed=matrix_seed))
    n, N = phi.shape
    x, head = draw_signal(generator(signal_seed), N, config.k, config.magnitude)
    e = draw_noise(generator(noise_seed), n, config.noise_l2)
    y = phi @ x + e
    record: dict[str, Any] = {
        "trial": t,
        "seeds": {"matrix": None if fixed_phi is not None else matrix_seed,
                  "signal": signal_seed, "noise": noise_seed},
        "signal_l2": float(np.linalg.norm(x)),
        "noise_l2": float(np.linalg.norm(e)),
    }
    if config.decoder == "omp":
        result = omp_decode(phi, y, OmpOptions(config.iterations, config.stop_rel))
        estimate = result.estimate
        record["iterations"] = result.iterations_run
        record["stopped_early"] = result.stopped_early
    else:
        estimate = oracle_ls_decoder(phi, y, head)
        record["iterations"] = 0
        record["stopped_early"] = False
    diff = estimate - x
    errors: dict[str, float] = {}
    for m in config.metrics:
        if m.name == "l1":
            errors["l1"] = lp_norm(diff, 1.0)
        elif m.name == "l2":
            errors["l2"] = lp_norm(diff, 2.0)
        elif m.name == "lq":
            errors[m.key] = lp_norm(diff, m.q)
        elif m.name == "success":
            record["success"] = bool(np.linalg.norm(diff) <= m.tol * np.linalg.norm(x))
        elif m.name == "sigma_ratio":
            sig = sigma_k(x, config.k, m.p) if config.k >= 1 else lp_norm(x, m.p)
            num = lp_norm(diff, m.q) * max(config.k, 1) ** (1.0 / m.p - 1.0 / m.q)
            record.setdefault("sigma_ratio", {})[m.key] = {
                "error_q_scaled": num,
                "sigma_k_p": sig,
                "ratio": num / sig if sig > 0.0 else None,
            }
    record["errors"] = errors
    return record


def aggregate(records: list[dict], config: ExperimentConfig) -> dict:
    """Summary statistics; recomputable from the per-trial records alone."""
    out: dict[str, Any] = {"trials": len(records)}
    for m in config.metrics:
        if m.name in ("l1", "l2", "lq"):
            vals = np.array([r["errors"][m.key] for r in records])
            out[m.key] = {"mean": float(np.mean(vals)), "median": float(np.median(vals)),
                          "max": float(np.max(vals))}
        elif m.name == "success":
            wins = sum(1 for r in records if r["success"])
            out["success_rate"] = wins / len(records)
            out["success_tol"] = m.tol
        elif m.name == "sigma_ratio":
            ratios = [r["sigma_ratio"][m.key]["ratio"] for r in records]
            defined = [v for v in ratios if v is not None]
            out[m.key] = {"worst": max(defined) if defined else None,
                          "undefined": len(ratios) - len(defined)}
    iters = [r["iterations"] for r in records]
    out["iterations"] = {"mean": float(np.mean(iters)), "max": int(max(iters))}
    out["stopped_early"] = sum(1 for r in records if r["stopped_early"])
    return out


def _map_trials(fn, count: int, workers: int | None = None) -> list:
    workers = _backend.worker_count() if workers is None else workers
    if workers <= 1 or count <= 1:
        return [fn(t) for t in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def run_experiment(config: ExperimentConfig | dict, workers: int | None = None) -> dict:
    """Run a trial batch and return the JSON-ready report.

    ``created_at`` is the only field that varies between runs of the same
    config.
    """
    if isinstance(config, dict):
        config = parse_experiment_config(config)
    fixed_phi = generate(config.matrix) if config.fixed_matrix else None
    records = _map_trials(lambda t: _run_trial(config, t, fixed_phi), config.trials, workers)
    return _jsonable({
        "v": SCHEMA_VERSION,
        "kind": "experiment",
        "created_at": _timestamp(),
        "config": config.to_dict(),
        "trials": records,
        "aggregates": aggregate(records, config),
    })


# --------------------------------------------------------------------------
# verification suites


def _matrix_source(cfg: dict) -> np.ndarray:
    if "matrix_csv" in cfg:
        from .io import read_matrix_csv

        return read_matrix_csv(cfg["matrix_csv"])
    return generate(parse_matrix_spec(_get(cfg, "matrix", "")))


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _suite_report(kind: str, cfg: dict, reports: list, keep: str) -> dict:
    holds = sum(1 for r in reports if r.holds)
    kept = reports if keep == "all" else [r for r in reports if not r.holds]
    by_status: dict[str, int] = {}
    for r in reports:
        by_status[r.premise_status] = by_status.get(r.premise_status, 0) + 1
    return _jsonable({
        "v": SCHEMA_VERSION,
        "kind": kind,
        "created_at": _timestamp(),
        "config": cfg,
        "summary": {"total": len(reports), "holds": holds, "violations": len(reports) - holds,
                    "premise_status": by_status},
        "reports": [r.to_dict() for r in kept],
    })


def _signal_for(rng, N: int, k: int, model: str) -> np.ndarray:
    if model == "dense":
        return box_muller(rng, N)
    if model == "compressible":
        # gaussian with power-law decay along a random permutation
        x = box_muller(rng, N) / np.arange(1, N + 1) ** 1.5
        return x[np.argsort(rng.random(N), kind="stable")]
    if model not in MAGNITUDES:
        raise _field_error("signal", f"unknown model {model!r}")
    return draw_signal(rng, N, k, model)[0]


def _premise_for(phi, k, delta, cfg) -> str:
    if cfg.get("premise", "check") != "check":
        return str(cfg.get("premise", NOT_CHECKED))
    rep = check_rip_premise(phi, k, delta, use_exact=bool(cfg.get("use_exact", True)),
                            samples=int(cfg.get("samples", 2000)), seed=int(cfg.get("seed", 0)))
    return rep.premise_status


def suite_theorem1(cfg: dict) -> list:
    phi = _matrix_source(cfg)
    n, N = phi.shape
    delta = _get(cfg, "delta", "", 1.0, float)
    ks = [int(v) for v in _as_list(_get(cfg, "k", ""))]
    pqs = _get(cfg, "pq", "", [[1.0, 2.0]])
    if not isinstance(pqs, list) or not all(isinstance(v, list) and len(v) == 2 for v in pqs):
        raise _field_error("pq", "expected a list of [p, q] pairs")
    noises = [float(v) for v in _as_list(_get(cfg, "noise_l2", "", 0.0))]
    trials = _get(cfg, "trials", "", 1, int)
    seed = check_seed(_get(cfg, "seed", "", 0, int))
    model = _get(cfg, "signal", "", "dense", str)
    premises = {k: _premise_for(phi, k, delta, cfg) for k in ks}
    reports = []
    for t in range(trials):
        rng = substream(seed, t)
        k = ks[t % len(ks)]
        p, q = (float(v) for v in pqs[(t // len(ks)) % len(pqs)])
        eps = noises[(t // (len(ks) * len(pqs))) % len(noises)]
        x = _signal_for(rng, N, k, model)
        e = draw_noise(rng, n, eps)
        rep = verify_theorem1(phi, x, e, k, p, q, delta, premises[k])
        rep.context["trial"] = t
        reports.append(rep)
    return reports


def suite_theorem2(cfg: dict) -> list:
    phi = _matrix_source(cfg)
    N = phi.shape[1]
    delta = _get(cfg, "delta", "", 1.0, float)
    c_bound = _get(cfg, "C", "", 1.0, float)
    ks = [int(v) for v in _as_list(_get(cfg, "k", ""))]
    trials = _get(cfg, "trials", "", 1, int)
    seed = check_seed(_get(cfg, "seed", "", 0, int))
    model = _get(cfg, "signal", "", "dense", str)
    premises = {k: _premise_for(phi, k, delta, cfg) for k in ks}
    reports = []
    for t in range(trials):
        rng = substream(seed, t)
        k = ks[t % len(ks)]
        rep = verify_theorem2(phi, _signal_for(rng, N, k, model), k, delta, c_bound, premises[k])
        rep.context["trial"] = t
        reports.append(rep)
    return reports


def suite_zhang(cfg: dict) -> list:
    phi = _matrix_source(cfg)
    n, N = phi.shape
    delta = _get(cfg, "delta", "", 1.0, float)
    k = _get(cfg, "k", "", kind=int)
    trials = _get(cfg, "trials", "", 1, int)
    seed = check_seed(_get(cfg, "seed", "", 0, int))
    eps = _get(cfg, "noise_l2", "", 0.0, float)
    model = _get(cfg, "signal", "", "dense", str)
    reports = []
    for t in range(trials):
        rng = substream(seed, t)
        x = _signal_for(rng, N, k, model)
        y = phi @ x + draw_noise(rng, n, eps)
        xbar = best_k_term(x, k, 2.0).approx
        rep = verify_zhang(phi, y, xbar, delta, use_exact=bool(cfg.get("use_exact", True)),
                           samples=int(cfg.get("samples", 2000)), seed=seed)
        rep.context["trial"] = t
        reports.append(rep)
    return reports


def suite_lemma1(cfg: dict) -> list:
    """Fresh matrices from the matrix spec (one substream each); per matrix the
    exact ``delta_L`` and ``z_per_matrix`` random vectors."""
    spec = parse_matrix_spec(_get(cfg, "matrix", ""))
    matrices = _get(cfg, "matrices", "", 1, int)
    k = _get(cfg, "k", "", 1, int)
    ps = [float(v) for v in _as_list(_get(cfg, "p", "", 1.0))]
    per = _get(cfg, "z_per_matrix", "", 100, int)
    seed = check_seed(_get(cfg, "seed", "", 0, int))
    reports = []
    for mi in range(matrices):
        mseed, zseed, _ = substream_seeds(seed, mi)
        phi = generate(replace(spec, seed=mseed)) if matrices > 1 else generate(spec)
        N = phi.shape[1]
        rng = generator(zseed)
        for p in ps:
            L = lemma1_order(N, k, p)
            delta = rip_delta_exact(phi, L).delta
            for zi in range(per):
                z = _lemma1_vector(rng, N)
                rep = verify_lemma1(phi, z, k, p, delta, premise_status=HOLDS if delta < 1 else REFUTED)
                rep.context.update(matrix=mi, draw=zi)
                reports.append(rep)
    return reports


def _lemma1_vector(rng, N: int) -> np.ndarray:
    # mixes dense, sparse and spiky draws
    z = box_muller(rng, N)
    mode = rng.random()
    if mode < 0.3:
        z[rng.random(N) < 0.6] = 0.0
    elif mode < 0.5:
        z *= np.exp(3.0 * box_muller(rng, N))
    return z


def suite_lemma2(cfg: dict) -> list:
    draws = _get(cfg, "draws", "", 1000, int)
    seed = check_seed(_get(cfg, "seed", "", 0, int))
    max_n = _get(cfg, "max_N", "", 24, int)
    reports = []
    for t in range(draws):
        rng = substream(seed, t)
        N = int(rng.integers(1, max_n + 1))
        k = int(rng.integers(1, N + 1))
        p = 1.0 + 3.0 * rng.random()
        q = math.inf if rng.random() < 0.1 else p + 4.0 * rng.random()
        z = _lemma1_vector(rng, N)
        rep = check_lemma2(z, k, p, q)
        rep.context["draw"] = t
        reports.append(rep)
    return reports


def suite_holder(cfg: dict) -> list:
    draws = _get(cfg, "draws", "", 1000, int)
    seed = check_seed(_get(cfg, "seed", "", 0, int))
    max_k = _get(cfg, "max_k", "", 32, int)
    reports = []
    for t in range(draws):
        rng = substream(seed, t)
        k = int(rng.integers(1, max_k + 1))
        q = 1.0 + rng.random()
        b = _lemma1_vector(rng, k)
        if rng.random() < 0.1:
            b = np.full(k, box_muller(rng, 1)[0])  # equality case
        rep = check_holder(b, q)
        rep.context["draw"] = t
        reports.append(rep)
    return reports


SUITES = {
    "theorem1": suite_theorem1,
    "theorem2": suite_theorem2,
    "zhang": suite_zhang,
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "holder": suite_holder,
}


def run_verification(kind: str, cfg: dict) -> dict:
    if kind not in SUITES:
        raise ContractViolation(f"unknown verification {kind!r}; choose from {sorted(SUITES)}")
    if not isinstance(cfg, dict):
        raise ContractViolation("config must be a JSON object")
    keep = cfg.get("keep_reports", "all")
    if keep not in ("all", "violations"):
        raise _field_error("keep_reports", "must be 'all' or 'violations'")
    return _suite_report(kind, cfg, SUITES[kind](cfg), keep)


__all__ = [
    "ExperimentConfig",
    "Metric",
    "aggregate",
    "draw_noise",
    "draw_signal",
    "parse_experiment_config",
    "run_experiment",
    "run_verification",
    "SUITES",
]
