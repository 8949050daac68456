"""The v1 HTTP JSON API: session endpoints for the lesson bench plus
stateless one-shot compute wrappers around every main library operation.

All bodies are UTF-8 JSON. Errors come back as {"code", "message"} with
status 400 (bad input or domain failure), 404 (unknown session), or 409
(state conflict, e.g. hint after the goal).
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import bench
from .basis import invert
from .echelon import (
    InconsistentSystem,
    ParametricSolution,
    UniqueSolution,
    ref,
    rref,
    solve,
)
from .eigen import francis_qr_eigenvalues, minimal_polynomial
from .errors import (
    GoalReachedError,
    LinalgError,
    NoConvergenceError,
    ParseError,
    RankDeficientError,
    SingularMatrixError,
    UnknownSessionError,
)
from .factor import det_via_lu, householder_qr, least_squares, lu
from .matrix import Matrix
from .poly import format_poly
from .scalars import FLOAT_DOMAIN, RATIONAL_DOMAIN, format_rational, parse_float, parse_rational


def _scalar_json(value):
    return format_rational(value) if not isinstance(value, float) else value


def _vector_json(vec):
    return [_scalar_json(v) for v in vec]


def _eig_json(matrix: Matrix, max_sweeps: Optional[int]) -> dict:
    rational = matrix.domain == RATIONAL_DOMAIN
    result = francis_qr_eigenvalues(matrix.to_float(), max_sweeps=max_sweeps)
    payload = {
        "eigenvalues": [
            {"re": lam.real, "im": lam.imag, "mult": mult} for lam, mult in result.grouped()
        ],
        "residuals": list(result.residuals),
        "iterations_used": result.iterations_used,
    }
    if rational:
        minpoly = minimal_polynomial(matrix)
        payload["minpoly"] = format_poly(minpoly)
        payload["minpoly_residuals"] = [
            abs(minpoly(complex(lam))) for lam in result.eigenvalues
        ]
    return payload


def compute(op: str, matrix: Matrix, args: dict) -> dict:
    """Stateless compute dispatch shared by the HTTP layer and the CLI serve mode."""
    if op in ("ref", "rref"):
        run = rref if op == "rref" else ref
        result = run(matrix, strategy=args.get("strategy", "first_nonzero"),
                     tol=args.get("tol"))
        payload = {
            "pivots": [list(p) for p in result.pivots],
            "free_cols": list(result.free_cols),
            "rank": result.rank,
            "exchange_count": result.exchange_count,
            "ref": result.ref.to_json(),
        }
        if result.rref is not None:
            payload["rref"] = result.rref.to_json()
        if args.get("trace"):
            payload["trace"] = result.trace.to_json()
        return payload
    if op == "solve":
        b = _parse_vector(args.get("b"), matrix)
        solution = solve(matrix, b, strategy=args.get("strategy", "first_nonzero"),
                         tol=args.get("tol"))
        if isinstance(solution, UniqueSolution):
            return {"kind": "unique", "x": _vector_json(solution.x)}
        if isinstance(solution, InconsistentSystem):
            return {"kind": "inconsistent", "witness_row": solution.witness_row}
        return {
            "kind": "parametric",
            "particular": _vector_json(solution.particular),
            "nullspace_basis": [_vector_json(v) for v in solution.nullspace_basis],
        }
    if op == "inv":
        return {"inverse": invert(matrix, tol=args.get("tol")).to_json()}
    if op == "lu":
        factors = lu(matrix, pivoting=args.get("pivoting"))
        return {
            "L": factors.l.to_json(),
            "R": factors.r.to_json(),
            "perm": list(factors.perm),
            "ex": factors.exchange_count,
        }
    if op == "det":
        return {"det": _scalar_json(det_via_lu(matrix))}
    if op == "qr":
        factors = householder_qr(matrix.to_float())
        return {"Q": factors.q.to_json(), "R": factors.r.to_json()}
    if op == "lstsq":
        b = _parse_vector(args.get("b"), matrix, domain=FLOAT_DOMAIN)
        result = least_squares(matrix.to_float(), b)
        return {"x": list(result.x), "residual_norm": result.residual_norm}
    if op == "minpoly":
        minpoly = minimal_polynomial(matrix)
        return {
            "minpoly": format_poly(minpoly),
            "degree": minpoly.degree,
            "coefficients": [format_rational(c) for c in minpoly.coefficients],
        }
    if op == "eig":
        max_sweeps = args.get("max_sweeps")
        return _eig_json(matrix, int(max_sweeps) if max_sweeps is not None else None)
    raise ParseError(f"unknown compute operation {op!r}")


def _parse_vector(raw, matrix: Matrix, domain: Optional[str] = None):
    if not isinstance(raw, list):
        raise ParseError("args.b must be a list of scalar tokens")
    if len(raw) != matrix.rows:
        raise ParseError(f"b has {len(raw)} entries, matrix has {matrix.rows} rows")
    use = domain or matrix.domain
    parse = parse_rational if use == RATIONAL_DOMAIN else parse_float
    return [parse(v) for v in raw]


def _parse_body_matrix(body: dict) -> Matrix:
    if not isinstance(body, dict) or "matrix" not in body:
        raise ParseError("body must carry a \"matrix\" object")
    return Matrix.from_json(body["matrix"])


def create_app(registry: Optional[bench.SessionRegistry] = None) -> FastAPI:
    app = FastAPI(title="matrixfirst lesson bench", version="v1")
    app.state.registry = registry if registry is not None else bench.SessionRegistry()
    # the browser companion is served from another origin; no credentials exist
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def fail(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(ParseError)
    async def _parse_error(request: Request, exc: ParseError):
        return fail(400, "bad_request", str(exc))

    @app.exception_handler(UnknownSessionError)
    async def _unknown_session(request: Request, exc: UnknownSessionError):
        return fail(404, "unknown_session", str(exc))

    @app.exception_handler(GoalReachedError)
    async def _goal_reached(request: Request, exc: GoalReachedError):
        return fail(409, "goal_reached", str(exc))

    @app.exception_handler(SingularMatrixError)
    async def _singular(request: Request, exc: SingularMatrixError):
        return fail(400, "singular_matrix", str(exc))

    @app.exception_handler(RankDeficientError)
    async def _rank_deficient(request: Request, exc: RankDeficientError):
        return fail(400, "rank_deficient", str(exc))

    @app.exception_handler(NoConvergenceError)
    async def _no_convergence(request: Request, exc: NoConvergenceError):
        return fail(409, "no_convergence", str(exc))

    @app.exception_handler(LinalgError)
    async def _domain_error(request: Request, exc: LinalgError):
        return fail(400, "domain_error", str(exc))

    @app.post("/v1/session")
    def create_session(body: dict):
        matrix = Matrix.from_json(body.get("matrix"), RATIONAL_DOMAIN)
        mode = body.get("mode", bench.MODE_REF)
        b = body.get("b")
        if b is not None:
            b = [parse_rational(x) for x in b]
        view = app.state.registry.create(matrix, mode, b)
        return {"id": view.id, "state": view.state_json()}

    @app.get("/v1/session/{sid}")
    def get_session(sid: str):
        return app.state.registry.get(sid).state_json()

    @app.post("/v1/session/{sid}/op")
    def apply_op(sid: str, body: dict):
        op = bench.bench_op_from_json(body.get("op"))
        outcome = app.state.registry.apply(sid, op)
        return {
            "accepted": outcome.accepted,
            "note": outcome.note,
            "state": outcome.session.state_json(),
        }

    @app.post("/v1/session/{sid}/hint")
    def hint(sid: str):
        h = app.state.registry.hint(sid)
        return {
            "op": bench.bench_op_to_json(h.suggested_op),
            "rationale": h.rationale,
            "resulting_pivot": list(h.resulting_pivot) if h.resulting_pivot else None,
        }

    @app.post("/v1/session/{sid}/whatif")
    def whatif(sid: str, body: dict):
        op = bench.bench_op_from_json(body.get("op"))
        result = app.state.registry.whatif(sid, op)
        payload = {
            "preview": result.preview.to_json(),
            "would_reach_goal": result.would_reach_goal,
            "note": result.note,
        }
        if result.annihilator is not None:
            payload["annihilator"] = format_poly(result.annihilator)
        return payload

    @app.get("/v1/session/{sid}/export")
    def export(sid: str):
        return app.state.registry.export(sid)

    @app.post("/v1/compute/{op}")
    def compute_endpoint(op: str, body: dict):
        matrix = _parse_body_matrix(body)
        args = body.get("args") or {}
        if not isinstance(args, dict):
            raise ParseError("args must be an object")
        return compute(op, matrix, args)

    return app
