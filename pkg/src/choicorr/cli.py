"""Command-line interface.

Exit codes: 0 for a true verdict (or a clean selftest), 1 for a false verdict
(or discrepancies), 2 for malformed input or any other error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import interchange as io
from .basis import basis_correspondence
from .correspondence import sigma_correspondence
from .linalg import DEFAULT_TOL, schmidt_decompose
from .maps import choi_of_map, cp_verdict, map_of_choi
from .selftest import run_selftest

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _uint64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write JSON here instead of stdout")
    common.add_argument("--tol", type=_unit_float, metavar="FLOAT",
                        help="equality tolerance; the other tolerances scale with it")

    parser = _ArgumentParser(
        prog="choicorr",
        description="Choi matrices, complete positivity, and which Sigma keep the Choi correspondence.",
        epilog="exit status: 0 true verdict, 1 false verdict, 2 error",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("choi", parents=[common], help="transfer-matrix file -> Choi matrix file")
    p.add_argument("file", help='map file, or "-" for stdin')

    p = sub.add_parser("map", parents=[common], help="Choi matrix file -> transfer-matrix file")
    p.add_argument("file", help='Choi file, or "-" for stdin')

    p = sub.add_parser("cp-check", parents=[common], help="decide complete positivity of a map")
    p.add_argument("file")
    p.add_argument("--kraus", metavar="DIR", help="dump Kraus operators into DIR when CP")

    p = sub.add_parser("sigma-check", parents=[common],
                       help="does Sigma preserve the Choi correspondence?")
    p.add_argument("file")
    p.add_argument("--witness", action="store_true", help="search for a counterexample map")
    p.add_argument("--seed", type=_uint64, default=0)

    p = sub.add_parser("basis-check", parents=[common],
                       help="does a basis preserve the Choi correspondence?")
    p.add_argument("file")
    p.add_argument("--witness", action="store_true", help="search for a counterexample map")
    p.add_argument("--seed", type=_uint64, default=0)

    p = sub.add_parser("schmidt", parents=[common], help="Schmidt decomposition of a vector")
    p.add_argument("file")

    p = sub.add_parser("selftest", parents=[common], help="seeded randomized self-check")
    p.add_argument("--seed", type=_uint64, default=0)
    p.add_argument("--trials", type=_positive_int, default=100)
    return parser


def _emit(obj, out: Optional[str]):
    text = io.dumps(obj)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _run(args) -> int:
    tol = DEFAULT_TOL if args.tol is None else DEFAULT_TOL.scaled(args.tol)
    cmd = args.command

    if cmd == "choi":
        _emit(io.choi_to_obj(choi_of_map(io.map_from_obj(io.load_json(args.file)))), args.out)
        return EXIT_TRUE

    if cmd == "map":
        _emit(io.map_to_obj(map_of_choi(io.choi_from_obj(io.load_json(args.file)))), args.out)
        return EXIT_TRUE

    if cmd == "cp-check":
        verdict = cp_verdict(io.map_from_obj(io.load_json(args.file)), tol)
        if args.kraus is not None and verdict.kraus is not None:
            os.makedirs(args.kraus, exist_ok=True)
            for k, s in enumerate(verdict.kraus.operators):
                with open(os.path.join(args.kraus, f"kraus_{k:03d}.json"), "w") as fh:
                    fh.write(io.dumps(io.matrix_to_obj(s)))
        _emit(io.cp_verdict_to_obj(verdict), args.out)
        return EXIT_TRUE if verdict.is_cp else EXIT_FALSE

    if cmd == "sigma-check":
        sigma = io.choi_from_obj(io.load_json(args.file))
        report = sigma_correspondence(sigma, tol, witness=args.witness, seed=args.seed)
        _emit(io.sigma_report_to_obj(report), args.out)
        return EXIT_TRUE if report.verdict else EXIT_FALSE

    if cmd == "basis-check":
        basis = io.basis_from_obj(io.load_json(args.file))
        report = basis_correspondence(basis, tol, witness=args.witness, seed=args.seed)
        _emit(io.basis_report_to_obj(report), args.out)
        return EXIT_TRUE if report.verdict else EXIT_FALSE

    if cmd == "schmidt":
        v = io.vector_from_obj(io.load_json(args.file))
        _emit(io.schmidt_to_obj(schmidt_decompose(v, tol=tol)), args.out)
        return EXIT_TRUE

    if cmd == "selftest":
        report = run_selftest(args.seed, args.trials)
        _emit(report, args.out)
        return EXIT_TRUE if report["clean"] else EXIT_FALSE

    raise AssertionError(cmd)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code in (0, EXIT_ERROR) else EXIT_ERROR
    try:
        return _run(args)
    except Exception as exc:  # exit-code contract is total
        print(f"choicorr: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
