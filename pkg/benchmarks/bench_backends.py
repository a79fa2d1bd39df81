"""Compare the numba kernels with the numpy/LAPACK fallback.

Run with ``python3 benchmarks/bench_backends.py``. The first numba call of
each kernel is made before timing so compilation is excluded.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from omp_lab import MatrixSpec, OmpOptions, generate, omp_decode, rip_delta_exact, use_backend
from omp_lab.linalg import lstsq_columns


def _cases(rng):
    phi = generate(MatrixSpec("gaussian", 64, 256, 1))
    x = np.zeros(256)
    x[rng.choice(256, 8, replace=False)] = rng.choice([-1.0, 1.0], 8)
    y = phi @ x
    block = phi[:, :16].copy()
    small = generate(MatrixSpec("gaussian", 12, 20, 2))
    return {
        "lstsq 64x16": lambda: lstsq_columns(block, y),
        "omp 64x256, M=8": lambda: omp_decode(phi, y, OmpOptions(8)),
        "rip exact 12x20, k=4": lambda: rip_delta_exact(small, 4),
    }


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    print(f"{'case':<24}{'numba [ms]':>12}{'numpy [ms]':>12}{'ratio':>8}")
    rows = {}
    for name in ("numba", "numpy"):
        with use_backend(name):
            for case, fn in _cases(np.random.default_rng(0)).items():
                fn()  # warm-up / JIT
                number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-6)))
                best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
                rows.setdefault(case, {})[name] = best * 1e3
    for case, t in rows.items():
        print(f"{case:<24}{t['numba']:>12.3f}{t['numpy']:>12.3f}{t['numpy'] / t['numba']:>8.2f}")


if __name__ == "__main__":
    main()
