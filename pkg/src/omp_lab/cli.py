"""``omp-lab`` command line.

Exit codes: 0 success, 1 contract violation, 2 I/O or format error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io
from .constants import constants
from .errors import ContractViolation, DataFormatError
from .harness import SUITES, run_experiment, run_verification
from .omp import OmpOptions, omp_decode
from .sensing import ENSEMBLES, MatrixSpec, check_rip_premise, generate, rip_delta_exact, rip_delta_lower_bound


def _emit(obj, out: str | None) -> None:
    if out:
        io.write_json(out, obj)
    else:
        sys.stdout.write(io.dumps(obj))


def cmd_gen_matrix(args) -> None:
    phi = generate(MatrixSpec(args.ensemble, args.rows, args.cols, args.seed))
    io.write_matrix_csv(args.out, phi)


def cmd_decode(args) -> None:
    phi = io.read_matrix_csv(args.matrix)
    y = io.read_vector_csv(args.y)
    result = omp_decode(phi, y, OmpOptions(args.iters, args.stop_rel))
    _emit({"v": 1, "kind": "decode", **result.to_dict()}, args.out)


def cmd_rip(args) -> None:
    phi = io.read_matrix_csv(args.matrix)
    if args.samples is not None:
        est = rip_delta_lower_bound(phi, args.k, args.samples, args.seed)
    else:
        est = rip_delta_exact(phi, args.k, args.budget)
    _emit({"v": 1, "kind": "rip", **est.to_dict()}, args.out)


def cmd_premise(args) -> None:
    phi = io.read_matrix_csv(args.matrix)
    report = check_rip_premise(phi, args.k, args.delta, use_exact=not args.no_exact,
                               samples=args.samples, seed=args.seed)
    _emit({"v": 1, **report.to_dict()}, args.out)


def cmd_verify(args) -> None:
    _emit(run_verification(args.kind, io.read_json(args.config)), args.out)


def cmd_experiment(args) -> None:
    _emit(run_experiment(io.read_json(args.config)), args.out)


def cmd_constants(args) -> None:
    c = constants(args.delta, args.q, args.C_bound)
    print(json.dumps({"v": 1, **c.to_dict()}, indent=2))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omp-lab", description="OMP decoding, RIP estimation and bound checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-matrix", help="draw a sensing matrix and write it as CSV")
    p.add_argument("--ensemble", choices=ENSEMBLES, required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_matrix)

    p = sub.add_parser("decode", help="run OMP on y")
    p.add_argument("--matrix", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--stop-rel", type=float, default=1e-12)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("rip", help="exact or sampled RIP constant")
    p.add_argument("--matrix", required=True)
    p.add_argument("--k", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="enumerate every support (default)")
    mode.add_argument("--samples", type=int, help="Monte-Carlo lower bound from this many supports")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rip)

    p = sub.add_parser("premise", help="check delta_k + (1+delta) delta_{alpha k} <= delta")
    p.add_argument("--matrix", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--no-exact", action="store_true", help="skip enumeration; use bounds only")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_premise)

    p = sub.add_parser("verify", help="randomized bound-verification suite")
    p.add_argument("kind", choices=sorted(SUITES))
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="seeded recovery experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("constants", help="print alpha, C0, C1, C2, C3 as JSON")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--C-bound", dest="C_bound", type=float)
    p.set_defaults(func=cmd_constants)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ContractViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
