"""Command-line entry point: every lesson procedure as a subcommand over
matrix files, plus the HTTP serve mode.

Exit codes: 0 success, 1 domain error (singular matrix, inconsistent system
when a unique answer was requested, non-convergence), 2 usage error (bad
flags, unreadable file, malformed matrix).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import bench
from .basis import BasisSet, change_of_basis, invert_traced
from .echelon import (
    InconsistentSystem,
    ParametricSolution,
    UniqueSolution,
    basis_check,
    ref,
    rref,
    solve,
)
from .eigen import charpoly_cost_demo, krylov_annihilator
from .errors import LinalgError, ParseError, ShapeError
from .factor import gs_compare, hilbert_matrix
from .matrix import Matrix
from .poly import format_poly
from .scalars import FLOAT_DOMAIN, RATIONAL_DOMAIN, format_rational, parse_float, parse_rational
from .server import compute, create_app

TOL_ENV_VAR = "MATRIXFIRST_TOL"


@dataclass(frozen=True)
class CliConfig:
    input_path: Optional[str]
    output: str  # "text" | "json"
    strategy: str
    tol: Optional[float]
    seed: int
    float_domain: bool
    trace: bool


def _add_common(parser: argparse.ArgumentParser, needs_input: bool = True):
    if needs_input:
        parser.add_argument("--in", dest="input", required=True, metavar="FILE",
                            help="matrix file: CSV of rational tokens, or JSON")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of text")
    parser.add_argument("--float", action="store_true", dest="float_domain",
                        help="parse entries as floats (default is exact rationals)")
    parser.add_argument("--strategy", choices=["first_nonzero", "partial_pivot"],
                        default="first_nonzero", help="pivot selection strategy")
    parser.add_argument("--tol", type=float, default=None,
                        help=f"float zero threshold (default scale-relative; "
                             f"env {TOL_ENV_VAR} overrides)")
    parser.add_argument("--trace", action="store_true", help="include the step trace")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized demos")


def _config(args: argparse.Namespace) -> CliConfig:
    tol = getattr(args, "tol", None)
    if tol is None:
        env = os.environ.get(TOL_ENV_VAR)
        if env:
            try:
                tol = float(env)
            except ValueError as exc:
                raise ParseError(f"bad {TOL_ENV_VAR} value {env!r}") from exc
    if tol is not None and tol <= 0:
        raise ParseError("tolerance must be positive")
    return CliConfig(
        input_path=getattr(args, "input", None),
        output="json" if getattr(args, "json", False) else "text",
        strategy=getattr(args, "strategy", "first_nonzero"),
        tol=tol,
        seed=getattr(args, "seed", 0),
        float_domain=getattr(args, "float_domain", False),
        trace=getattr(args, "trace", False),
    )


def _read_matrix(path: str, float_domain: bool) -> Matrix:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    domain = FLOAT_DOMAIN if float_domain else RATIONAL_DOMAIN
    if text.lstrip().startswith("{"):
        return Matrix.from_json(json.loads(text), domain)
    return Matrix.from_csv(text, domain)


def _parse_vector(tokens: str, float_domain: bool) -> list:
    parse = parse_float if float_domain else parse_rational
    return [parse(tok) for tok in tokens.split(",")]


def _emit(payload: dict, cfg: CliConfig, text_lines: Sequence[str]) -> None:
    if cfg.output == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _fmt_scalar(value) -> str:
    return format_rational(value) if not isinstance(value, float) else repr(value)


def _fmt_vector(vec) -> str:
    return "(" + ", ".join(_fmt_scalar(v) for v in vec) + ")"


# -- subcommand bodies ---------------------------------------------------------


def _cmd_echelon(args, reduced: bool) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    op = "rref" if reduced else "ref"
    payload = compute(op, matrix, {"strategy": cfg.strategy, "tol": cfg.tol,
                                   "trace": cfg.trace})
    result = (rref if reduced else ref)(matrix, cfg.strategy, cfg.tol)
    shown = result.rref if reduced else result.ref
    lines = [
        str(shown),
        f"pivots: {[tuple(p) for p in result.pivots]}",
        f"free columns: {list(result.free_cols)}",
        f"rank: {result.rank}",
        f"row exchanges: {result.exchange_count}",
    ]
    if cfg.trace:
        lines += [f"steps: {len(result.trace.steps)}"] + [
            f"  [{i}] {s.annotation}" for i, s in enumerate(result.trace.steps)
        ]
    _emit(payload, cfg, lines)
    return 0


def _cmd_solve(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    b = _parse_vector(args.rhs, cfg.float_domain)
    payload = compute("solve", matrix, {"b": [format_rational(x) if not cfg.float_domain
                                              else float(x) for x in b],
                                        "strategy": cfg.strategy, "tol": cfg.tol})
    solution = solve(matrix, b, cfg.strategy, cfg.tol)
    if isinstance(solution, UniqueSolution):
        _emit(payload, cfg, ["unique solution", f"x = {_fmt_vector(solution.x)}"])
        return 0
    if isinstance(solution, InconsistentSystem):
        _emit(payload, cfg, [
            "inconsistent system",
            f"witness: REF row {solution.witness_row} has a pivot in the augmented column",
        ])
        return 1
    lines = ["parametric solution",
             f"particular: {_fmt_vector(solution.particular)}"]
    for v in solution.nullspace_basis:
        lines.append(f"nullspace direction: {_fmt_vector(v)}")
    _emit(payload, cfg, lines)
    return 0


def _cmd_inv(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    inverse, trace = invert_traced(matrix, cfg.tol)
    payload = {"inverse": inverse.to_json()}
    if cfg.trace:
        payload["trace"] = trace.to_json()
    lines = [str(inverse)]
    if cfg.trace:
        lines += [f"steps: {len(trace.steps)}"] + [
            f"  [{i}] {s.annotation}" for i, s in enumerate(trace.steps)
        ]
    _emit(payload, cfg, lines)
    return 0


def _cmd_basis_check(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    vectors = [list(matrix.row(i)) for i in range(matrix.rows)]
    report = basis_check(vectors, args.dim, tol=cfg.tol)
    payload = {"is_basis": report.is_basis, "reason": report.reason,
               "rank": report.rank, "count": report.count}
    _emit(payload, cfg, [
        f"is_basis: {report.is_basis}",
        f"reason: {report.reason}",
        f"rank {report.rank} vs count {report.count} (duality check)",
    ])
    return 0


def _cmd_change_basis(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    basis_matrix = _read_matrix(args.basis, cfg.float_domain)
    basis = BasisSet.from_matrix(basis_matrix)
    rep = change_of_basis(matrix, basis)
    _emit({"representation": rep.to_json()}, cfg, [str(rep)])
    return 0


def _cmd_lu(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    payload = compute("lu", matrix, {"pivoting": args.pivoting})
    lines = [
        "L:", Matrix.from_json(payload["L"]).__str__(),
        "R:", Matrix.from_json(payload["R"]).__str__(),
        f"perm: {payload['perm']}",
        f"exchanges: {payload['ex']}",
    ]
    _emit(payload, cfg, lines)
    return 0


def _cmd_det(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    payload = compute("det", matrix, {})
    _emit(payload, cfg, [f"det = {payload['det']}"])
    return 0


def _cmd_qr(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    payload = compute("qr", matrix, {})
    _emit(payload, cfg, [
        "Q:", str(Matrix.from_json(payload["Q"])),
        "R:", str(Matrix.from_json(payload["R"])),
    ])
    return 0


def _cmd_gs_compare(args) -> int:
    cfg = _config(args)
    if args.hilbert is not None:
        matrix = hilbert_matrix(args.hilbert)
    else:
        if cfg.input_path is None:
            raise ParseError("gs-compare needs --in FILE or --hilbert N")
        matrix = _read_matrix(cfg.input_path, True)
    comparison = gs_compare(matrix)
    payload = {
        "gram_schmidt_deviation": comparison.gram_schmidt_deviation,
        "householder_deviation": comparison.householder_deviation,
        "ratio": comparison.ratio,
    }
    _emit(payload, cfg, [
        "orthogonality deviation ||Q^T Q - I||_max",
        f"  classical Gram-Schmidt: {comparison.gram_schmidt_deviation:.3e}",
        f"  Householder QR:         {comparison.householder_deviation:.3e}",
        f"  ratio:                  {comparison.ratio:.3e}",
    ])
    return 0


def _cmd_lstsq(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, True)
    b = _parse_vector(args.rhs, True)
    payload = compute("lstsq", matrix, {"b": [float(x) for x in b]})
    _emit(payload, cfg, [
        f"x = {_fmt_vector(payload['x'])}",
        f"residual norm = {payload['residual_norm']:.6e}",
    ])
    return 0


def _cmd_minpoly(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    payload = compute("minpoly", matrix, {})
    _emit(payload, cfg, [f"minimal polynomial: {payload['minpoly']}"])
    return 0


def _cmd_eig(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    payload = compute("eig", matrix, {"max_sweeps": args.max_sweeps})
    lines = []
    for item in payload["eigenvalues"]:
        lam = complex(item["re"], item["im"])
        lines.append(f"lambda = {lam:.10g}  (multiplicity {item['mult']})")
    if "minpoly" in payload:
        lines.append(f"minimal polynomial: {payload['minpoly']}")
        worst = max(payload["minpoly_residuals"]) if payload["minpoly_residuals"] else 0.0
        lines.append(f"max |p(lambda)| certificate residual: {worst:.3e}")
    _emit(payload, cfg, lines)
    return 0


def _cmd_krylov(args) -> int:
    cfg = _config(args)
    matrix = _read_matrix(cfg.input_path, cfg.float_domain)
    b = _parse_vector(args.b, False)
    result = krylov_annihilator(matrix, b)
    payload = {
        "iterates": [[format_rational(x) for x in vec] for vec in result.iterates],
        "dependency": [format_rational(c) for c in result.dependency],
        "annihilator": format_poly(result.annihilator),
        "degree": result.annihilator.degree,
    }
    lines = [f"iterate A^{k} b = {_fmt_vector(v)}" for k, v in enumerate(result.iterates)]
    lines.append(f"annihilator: {format_poly(result.annihilator)}")
    _emit(payload, cfg, lines)
    return 0


def _cmd_charpoly_cost(args) -> int:
    cfg = _config(args)
    demo = charpoly_cost_demo(args.n, seed=cfg.seed)
    payload = {"permutation_terms": demo.permutation_terms, "wallclock": demo.wallclock}
    _emit(payload, cfg, [
        f"n = {args.n}: {demo.permutation_terms} signed products",
        f"wallclock: {demo.wallclock:.6f} s",
    ])
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    registry = bench.SessionRegistry(
        idle_ttl=args.ttl_hours * 3600.0,
        log_dir=args.log_dir,
    )
    if args.recover and args.log_dir:
        restored = bench.recover_sessions(args.log_dir, registry)
        print(f"recovered {restored} sessions from {args.log_dir}", file=sys.stderr)
    app = create_app(registry)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matrixfirst",
        description="Matrix-first linear algebra engine: row reduction through "
                    "QR eigenvalues, with step traces for every elimination.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ref", help="row echelon form with pivots and free columns")
    _add_common(p)
    p.set_defaults(func=lambda a: _cmd_echelon(a, reduced=False))

    p = sub.add_parser("rref", help="reduced row echelon form")
    _add_common(p)
    p.set_defaults(func=lambda a: _cmd_echelon(a, reduced=True))

    p = sub.add_parser("solve", help="solve A x = b, classifying the solution set")
    _add_common(p)
    p.add_argument("--rhs", required=True, help="right-hand side, comma-separated tokens")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("inv", help="matrix inverse by Gauss-Jordan on [A | I]")
    _add_common(p)
    p.set_defaults(func=_cmd_inv)

    p = sub.add_parser("basis-check", help="check rows of FILE as a basis of given dimension")
    _add_common(p)
    p.add_argument("--dim", type=int, required=True, help="expected dimension")
    p.set_defaults(func=_cmd_basis_check)

    p = sub.add_parser("change-basis", help="represent the map in another basis: U^-1 A U")
    _add_common(p)
    p.add_argument("--basis", required=True, metavar="FILE",
                   help="basis matrix file (columns are the basis vectors)")
    p.set_defaults(func=_cmd_change_basis)

    p = sub.add_parser("lu", help="LU factorization P A = L R with exchange count")
    _add_common(p)
    p.add_argument("--pivoting", choices=["none", "partial", "first_nonzero"], default=None)
    p.set_defaults(func=_cmd_lu)

    p = sub.add_parser("det", help="determinant via the LU diagonal and (-1)^ex")
    _add_common(p)
    p.set_defaults(func=_cmd_det)

    p = sub.add_parser("qr", help="Householder QR factorization")
    _add_common(p)
    p.set_defaults(func=_cmd_qr)

    p = sub.add_parser("gs-compare", help="orthogonality loss: classical Gram-Schmidt "
                                          "vs Householder")
    p.add_argument("--in", dest="input", metavar="FILE", default=None)
    p.add_argument("--hilbert", type=int, default=None, metavar="N",
                   help="use the n-by-n Hilbert matrix instead of a file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gs_compare, float_domain=True, strategy="first_nonzero",
                   tol=None, trace=False)

    p = sub.add_parser("lstsq", help="least squares via QR")
    _add_common(p)
    p.add_argument("--rhs", required=True)
    p.set_defaults(func=_cmd_lstsq)

    p = sub.add_parser("minpoly", help="exact minimal polynomial via Krylov iteration")
    _add_common(p)
    p.set_defaults(func=_cmd_minpoly)

    p = sub.add_parser("eig", help="eigenvalues by shifted QR; exact minimal-polynomial "
                                   "certificate for rational input")
    _add_common(p)
    p.add_argument("--max-sweeps", type=int, default=None)
    p.set_defaults(func=_cmd_eig)

    p = sub.add_parser("krylov", help="Krylov iterates and the annihilator of b")
    _add_common(p)
    p.add_argument("--b", required=True, help="start vector, comma-separated tokens")
    p.set_defaults(func=_cmd_krylov)

    p = sub.add_parser("charpoly-cost", help="measure the n! cost of the determinant road")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_charpoly_cost, input=None, float_domain=False,
                   strategy="first_nonzero", tol=None, trace=False)

    p = sub.add_parser("serve", help="run the lesson-bench HTTP JSON API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--log-dir", default=None, help="append-only transcript log directory")
    p.add_argument("--ttl-hours", type=float, default=24.0, help="session idle expiry")
    p.add_argument("--recover", action="store_true",
                   help="rebuild sessions from the transcript log at startup")
    p.set_defaults(func=_cmd_serve)

    return parser


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LinalgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
