"""Row echelon machinery: elementary row operations, traced elimination,
and the decision procedures for independence, span, and basis questions.

Everything here reduces to one engine: bring the column-vector matrix to
(reduced) row echelon form without column swaps and read pivots and free
columns off the result. Rational-domain runs are exact; float-domain runs
treat entries below a scale-relative threshold as zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import ParseError, ShapeError, SpanContainmentError
from .matrix import Matrix
from .scalars import FLOAT_DOMAIN, RATIONAL_DOMAIN, format_rational, parse_float, parse_rational

# Float entries at or below DEFAULT_REL_TOL * max(1, ||A||_max) count as zero.
DEFAULT_REL_TOL = 1e-11

FIRST_NONZERO = "first_nonzero"
PARTIAL_PIVOT = "partial_pivot"
STRATEGIES = (FIRST_NONZERO, PARTIAL_PIVOT)


# -- elementary row operations -------------------------------------------------


@dataclass(frozen=True)
class Swap:
    i: int
    j: int


@dataclass(frozen=True)
class Scale:
    i: int
    factor: Union[Fraction, float]


@dataclass(frozen=True)
class AddMultiple:
    src: int
    factor: Union[Fraction, float]
    dst: int


RowOp = Union[Swap, Scale, AddMultiple]


def validate_rowop(matrix: Matrix, op: RowOp) -> Optional[str]:
    """Why the op is illegal on this matrix, or None if it is fine."""
    n = matrix.rows
    if isinstance(op, Swap):
        if not (0 <= op.i < n and 0 <= op.j < n):
            return f"row index out of range for {n} rows"
        return None
    if isinstance(op, Scale):
        if not 0 <= op.i < n:
            return f"row index out of range for {n} rows"
        if op.factor == 0:
            return "scaling a row by zero is not an elementary operation"
        return None
    if isinstance(op, AddMultiple):
        if not (0 <= op.src < n and 0 <= op.dst < n):
            return f"row index out of range for {n} rows"
        if op.src == op.dst:
            return "source and destination rows must differ"
        return None
    return f"unknown operation {op!r}"


def apply_rowop(matrix: Matrix, op: RowOp) -> Matrix:
    reason = validate_rowop(matrix, op)
    if reason is not None:
        raise ShapeError(reason)
    rows = matrix.row_lists()
    if isinstance(op, Swap):
        rows[op.i], rows[op.j] = rows[op.j], rows[op.i]
    elif isinstance(op, Scale):
        rows[op.i] = [op.factor * v for v in rows[op.i]]
    else:
        rows[op.dst] = [v + op.factor * s for v, s in zip(rows[op.dst], rows[op.src])]
    return Matrix.from_rows(rows, matrix.domain)


def det_effect(op: RowOp) -> Union[Fraction, float, int]:
    """Multiplicative effect of the op on a determinant."""
    if isinstance(op, Swap):
        return -1
    if isinstance(op, Scale):
        return op.factor
    return 1


def rowop_to_json(op: RowOp) -> dict:
    def fmt(factor):
        return format_rational(factor) if isinstance(factor, Fraction) else float(factor)

    if isinstance(op, Swap):
        return {"kind": "Swap", "i": op.i, "j": op.j}
    if isinstance(op, Scale):
        return {"kind": "Scale", "i": op.i, "factor": fmt(op.factor)}
    if isinstance(op, AddMultiple):
        return {"kind": "AddMultiple", "src": op.src, "factor": fmt(op.factor), "dst": op.dst}
    raise ParseError(f"not a row operation: {op!r}")


def rowop_from_json(obj: dict, domain: str = RATIONAL_DOMAIN) -> RowOp:
    if not isinstance(obj, dict):
        raise ParseError("row op must be a JSON object")
    parse = parse_rational if domain == RATIONAL_DOMAIN else parse_float
    kind = obj.get("kind")
    try:
        if kind == "Swap":
            return Swap(int(obj["i"]), int(obj["j"]))
        if kind == "Scale":
            return Scale(int(obj["i"]), parse(obj["factor"]))
        if kind == "AddMultiple":
            return AddMultiple(int(obj["src"]), parse(obj["factor"]), int(obj["dst"]))
    except KeyError as exc:
        raise ParseError(f"row op missing field {exc}") from exc
    raise ParseError(f"unknown row op kind {kind!r}")


# -- step traces ---------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    op: RowOp
    annotation: str
    after: Matrix


@dataclass(frozen=True)
class StepTrace:
    steps: tuple[TraceStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {
            "steps": [
                {
                    "op": rowop_to_json(s.op),
                    "annotation": s.annotation,
                    "after": s.after.to_json()["data"],
                }
                for s in self.steps
            ]
        }

    @classmethod
    def from_json(cls, obj: dict, domain: str = RATIONAL_DOMAIN) -> "StepTrace":
        steps = []
        for raw in obj.get("steps", []):
            after = raw["after"]
            snapshot = Matrix.from_json(
                {"rows": len(after), "cols": len(after[0]), "data": after}, domain
            )
            steps.append(
                TraceStep(rowop_from_json(raw["op"], domain), raw.get("annotation", ""), snapshot)
            )
        return cls(tuple(steps))


def verify_replay(initial: Matrix, trace: StepTrace) -> Optional[int]:
    """Re-run the ops from the initial matrix; return the index of the first
    step whose snapshot does not match, or None when the trace is sound."""
    current = initial
    for idx, step in enumerate(trace.steps):
        current = apply_rowop(current, step.op)
        if current != step.after:
            return idx
    return None


# -- echelon forms ---------------------------------------------------------------


@dataclass(frozen=True)
class RefResult:
    ref: Matrix
    rref: Optional[Matrix]
    pivots: tuple[tuple[int, int], ...]
    free_cols: tuple[int, ...]
    rank: int
    trace: StepTrace
    exchange_count: int


def default_zero_tol(matrix: Matrix, tol: Optional[float] = None) -> float:
    if tol is not None:
        return tol
    return DEFAULT_REL_TOL * max(1.0, float(matrix.max_norm()))


def _zero_test(matrix: Matrix, tol: Optional[float]):
    if matrix.domain == RATIONAL_DOMAIN:
        return lambda x: x == 0
    threshold = default_zero_tol(matrix, tol)
    return lambda x: abs(x) <= threshold


def _eliminate(matrix: Matrix, strategy: str, tol: Optional[float], want_rref: bool) -> RefResult:
    if strategy not in STRATEGIES:
        raise ParseError(f"unknown pivot strategy {strategy!r}")
    is_zero = _zero_test(matrix, tol)
    domain = matrix.domain
    exact = domain == RATIONAL_DOMAIN
    work = matrix.row_lists()
    n_rows, n_cols = matrix.rows, matrix.cols
    steps: list[TraceStep] = []

    def snapshot() -> Matrix:
        return Matrix.from_rows([row[:] for row in work], domain)

    def record(op: RowOp, annotation: str):
        steps.append(TraceStep(op, annotation, snapshot()))

    pivots: list[tuple[int, int]] = []
    exchange_count = 0
    pivot_row = 0
    for col in range(n_cols):
        if pivot_row == n_rows:
            break
        candidates = [r for r in range(pivot_row, n_rows) if not is_zero(work[r][col])]
        if not candidates:
            continue
        if strategy == FIRST_NONZERO:
            chosen = candidates[0]
        else:
            # max returns the first of tied candidates, i.e. the lowest row index
            chosen = max(candidates, key=lambda r: abs(work[r][col]))
        if chosen != pivot_row:
            work[pivot_row], work[chosen] = work[chosen], work[pivot_row]
            exchange_count += 1
            record(
                Swap(pivot_row, chosen),
                f"swap rows {pivot_row} and {chosen} to bring a pivot into row {pivot_row}",
            )
        pivot_val = work[pivot_row][col]
        for r in range(pivot_row + 1, n_rows):
            val = work[r][col]
            if is_zero(val):
                continue
            factor = -(val / pivot_val)
            target = work[r]
            src = work[pivot_row]
            for c in range(n_cols):
                target[c] = target[c] + factor * src[c]
            if not exact:
                target[col] = 0.0
            record(AddMultiple(pivot_row, factor, r), f"eliminate below pivot ({pivot_row},{col})")
        pivots.append((pivot_row, col))
        pivot_row += 1

    ref_matrix = snapshot()
    pivot_cols = {c for _, c in pivots}
    free_cols = tuple(c for c in range(n_cols) if c not in pivot_cols)
    rref_matrix = None

    if want_rref:
        for r, c in pivots:
            pivot_val = work[r][c]
            if pivot_val != 1:
                factor = Fraction(1) / pivot_val if exact else 1.0 / pivot_val
                work[r] = [factor * v for v in work[r]]
                if not exact:
                    work[r][c] = 1.0
                shown = format_rational(factor) if exact else repr(factor)
                record(Scale(r, factor), f"scale row {r} by {shown} to make pivot ({r},{c}) a 1")
        for r, c in pivots:
            for above in range(r):
                val = work[above][c]
                if is_zero(val):
                    continue
                factor = -val
                target = work[above]
                src = work[r]
                for cc in range(n_cols):
                    target[cc] = target[cc] + factor * src[cc]
                if not exact:
                    target[c] = 0.0
                record(AddMultiple(r, factor, above), f"eliminate above pivot ({r},{c})")
        rref_matrix = snapshot()

    return RefResult(
        ref=ref_matrix,
        rref=rref_matrix,
        pivots=tuple(pivots),
        free_cols=free_cols,
        rank=len(pivots),
        trace=StepTrace(tuple(steps)),
        exchange_count=exchange_count,
    )


def ref(matrix: Matrix, strategy: str = FIRST_NONZERO, tol: Optional[float] = None) -> RefResult:
    """Row echelon form with pivot/free-column discovery. No column swaps,
    ever: pivot positions are invariants of the matrix."""
    return _eliminate(matrix, strategy, tol, want_rref=False)


def rref(matrix: Matrix, strategy: str = FIRST_NONZERO, tol: Optional[float] = None) -> RefResult:
    """Reduced row echelon form: unit pivots, zeros above and below."""
    return _eliminate(matrix, strategy, tol, want_rref=True)


def rank(matrix: Matrix, tol: Optional[float] = None) -> int:
    return ref(matrix, tol=tol).rank


def _leading_col(row: Sequence, is_zero) -> Optional[int]:
    for j, v in enumerate(row):
        if not is_zero(v):
            return j
    return None


def is_ref(matrix: Matrix, tol: Optional[float] = None) -> bool:
    """Staircase test: leading entries move strictly right, zero rows at the bottom."""
    is_zero = _zero_test(matrix, tol)
    last = -1
    seen_zero_row = False
    for i in range(matrix.rows):
        lead = _leading_col(matrix.row(i), is_zero)
        if lead is None:
            seen_zero_row = True
            continue
        if seen_zero_row or lead <= last:
            return False
        last = lead
    return True


def is_rref(matrix: Matrix, tol: Optional[float] = None) -> bool:
    if not is_ref(matrix, tol):
        return False
    is_zero = _zero_test(matrix, tol)
    for i in range(matrix.rows):
        lead = _leading_col(matrix.row(i), is_zero)
        if lead is None:
            continue
        if matrix[i, lead] != 1:
            return False
        for r in range(matrix.rows):
            if r != i and not is_zero(matrix[r, lead]):
                return False
    return True


# -- linear systems -----------------------------------------------------------


@dataclass(frozen=True)
class UniqueSolution:
    x: tuple


@dataclass(frozen=True)
class ParametricSolution:
    particular: tuple
    nullspace_basis: tuple[tuple, ...]


@dataclass(frozen=True)
class InconsistentSystem:
    witness_row: int


Solution = Union[UniqueSolution, ParametricSolution, InconsistentSystem]


def _augment(matrix: Matrix, b: Sequence) -> Matrix:
    if len(b) != matrix.rows:
        raise ShapeError(f"right-hand side length {len(b)} vs {matrix.rows} rows")
    rows = [list(matrix.row(i)) + [b[i]] for i in range(matrix.rows)]
    return Matrix.from_rows(rows, matrix.domain)


def _nullspace_from(result: RefResult, n_cols: int) -> tuple[tuple, ...]:
    reduced = result.rref
    assert reduced is not None
    zero = Fraction(0) if reduced.domain == RATIONAL_DOMAIN else 0.0
    one = Fraction(1) if reduced.domain == RATIONAL_DOMAIN else 1.0
    basis = []
    for free in result.free_cols:
        if free >= n_cols:
            continue
        v = [zero] * n_cols
        v[free] = one
        for r, c in result.pivots:
            if c < n_cols:
                v[c] = -reduced[r, free]
        basis.append(tuple(v))
    return tuple(basis)


def solve(matrix: Matrix, b: Sequence, strategy: str = FIRST_NONZERO, tol: Optional[float] = None) -> Solution:
    """Classify and solve A x = b from the REF of the augmented matrix.

    Unique when every column has a pivot and the system is consistent;
    Inconsistent exactly when the augmented column gains a pivot; otherwise
    Parametric with free variables pinned to zero in the particular solution
    and one nullspace basis vector per free column.
    """
    augmented = _augment(matrix, b)
    result = rref(augmented, strategy, tol)
    b_col = matrix.cols
    for r, c in result.pivots:
        if c == b_col:
            return InconsistentSystem(witness_row=r)
    reduced = result.rref
    zero = Fraction(0) if matrix.domain == RATIONAL_DOMAIN else 0.0
    particular = [zero] * matrix.cols
    for r, c in result.pivots:
        particular[c] = reduced[r, b_col]
    if result.rank == matrix.cols:
        return UniqueSolution(tuple(particular))
    return ParametricSolution(tuple(particular), _nullspace_from(result, matrix.cols))


def nullspace_basis(matrix: Matrix, tol: Optional[float] = None) -> tuple[tuple, ...]:
    """One exact kernel vector per free column; empty at full column rank."""
    return _nullspace_from(rref(matrix, tol=tol), matrix.cols)


# -- independence / span / basis decision procedures ---------------------------


def _sniff_domain(vectors: Sequence[Sequence]) -> str:
    for v in vectors:
        for x in v:
            if isinstance(x, float):
                return FLOAT_DOMAIN
    return RATIONAL_DOMAIN


def column_matrix(vectors: Sequence[Sequence]) -> Matrix:
    if not vectors:
        raise ShapeError("need at least one vector")
    lengths = {len(v) for v in vectors}
    if len(lengths) != 1:
        raise ShapeError("vectors differ in length")
    return Matrix.from_columns(list(vectors), _sniff_domain(vectors))


@dataclass(frozen=True)
class IndependenceReport:
    independent: bool
    dependent_index: Optional[int] = None
    coefficients: Optional[tuple] = None


def is_independent(vectors: Sequence[Sequence], tol: Optional[float] = None) -> IndependenceReport:
    """Independent iff the column-vector matrix has no free column.

    When dependent, the first free column ell is reported together with the
    coefficients writing z_ell as a combination of z_0 .. z_{ell-1}.
    """
    a = column_matrix(vectors)
    result = ref(a, tol=tol)
    if result.rank == len(vectors):
        return IndependenceReport(independent=True)
    ell = min(c for c in result.free_cols)
    if ell == 0:
        return IndependenceReport(independent=False, dependent_index=0, coefficients=())
    prefix = Matrix.from_columns([list(v) for v in vectors[:ell]], a.domain)
    solution = solve(prefix, list(vectors[ell]), tol=tol)
    assert isinstance(solution, UniqueSolution)  # columns before the first free column are independent
    return IndependenceReport(independent=False, dependent_index=ell, coefficients=solution.x)


@dataclass(frozen=True)
class SpanReport:
    member: bool
    coefficients: Optional[tuple] = None


def in_span(v: Sequence, spanning: Sequence[Sequence], tol: Optional[float] = None) -> SpanReport:
    """Membership of v in span(spanning), with reproducing coefficients."""
    a = column_matrix(spanning)
    if len(v) != a.rows:
        raise ShapeError(f"vector length {len(v)} vs {a.rows}")
    solution = solve(a, list(v), tol=tol)
    if isinstance(solution, InconsistentSystem):
        return SpanReport(member=False)
    if isinstance(solution, UniqueSolution):
        return SpanReport(member=True, coefficients=solution.x)
    return SpanReport(member=True, coefficients=solution.particular)


def span_equals(u_set: Sequence[Sequence], w_set: Sequence[Sequence], tol: Optional[float] = None) -> bool:
    """True iff each family lies inside the span of the other."""
    return all(in_span(u, w_set, tol).member for u in u_set) and all(
        in_span(w, u_set, tol).member for w in w_set
    )


@dataclass(frozen=True)
class SizeBoundReport:
    forced_dependent: bool
    certificate: dict


def independence_size_bound(
    spanning: Sequence[Sequence], s_vectors: Sequence[Sequence], tol: Optional[float] = None
) -> SizeBoundReport:
    """Size bound for independent sets: more vectors than the span's dimension
    cannot stay independent. S must lie inside span(spanning)."""
    for idx, s in enumerate(s_vectors):
        if not in_span(s, spanning, tol).member:
            raise SpanContainmentError(idx)
    ell = len(spanning)
    m = len(s_vectors)
    k = rank(column_matrix(spanning), tol=tol)
    certificate = {
        "m": m,
        "ell": ell,
        "dim": k,
        "statement": f"m = {m} vectors inside a span of dimension k = {k} <= ell = {ell}",
    }
    if m <= k:
        return SizeBoundReport(forced_dependent=False, certificate=certificate)
    report = is_independent(s_vectors, tol=tol)
    certificate["dependency"] = {
        "index": report.dependent_index,
        "coefficients": report.coefficients,
    }
    return SizeBoundReport(forced_dependent=True, certificate=certificate)


@dataclass(frozen=True)
class BasisReport:
    is_basis: bool
    reason: str
    rank: int
    count: int


def basis_check(
    vectors: Sequence[Sequence],
    expected_dim: int,
    assume: Optional[str] = None,
    tol: Optional[float] = None,
) -> BasisReport:
    """Check a set of vectors for basis-hood of a subspace of known dimension.

    At count == expected_dim the two basis criteria coincide: k independent
    vectors span, and k spanning vectors are independent (rank == count ==
    expected_dim either way). `assume` records which side was taken as given
    so the report names the direction actually used.
    """
    count = len(vectors)
    r = rank(column_matrix(vectors), tol=tol) if vectors else 0
    ok = count == expected_dim and r == count
    if not ok:
        reason = "fails"
    elif assume == "spanning":
        reason = "spanning_hence_independent"
    else:
        reason = "independent_hence_spanning"
    return BasisReport(is_basis=ok, reason=reason, rank=r, count=count)
