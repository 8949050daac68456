"""Matrix inversion and change-of-basis machinery.

Inversion runs Gauss-Jordan on the augmented block [A | I], the same
procedure students perform by hand, and keeps the full step trace. Basis
representations are computed as U^-1 A U, exactly in the rational domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .echelon import StepTrace, is_independent, rref
from .errors import NotDiagonalError, ShapeError, SingularMatrixError
from .matrix import Matrix
from .scalars import FLOAT_DOMAIN, RATIONAL_DOMAIN


@dataclass(frozen=True)
class BasisSet:
    """A full basis of n-space: n independent vectors, also held as columns."""

    vectors: tuple[tuple, ...]
    as_matrix: Matrix

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence]) -> "BasisSet":
        vecs = tuple(tuple(v) for v in vectors)
        if not vecs or len(vecs) != len(vecs[0]):
            raise ShapeError(f"a basis of n-space needs n vectors of length n")
        report = is_independent(vecs)
        if not report.independent:
            raise ShapeError(
                f"not a basis: vector {report.dependent_index} depends on its predecessors"
            )
        matrix = Matrix.from_columns([list(v) for v in vecs])
        return cls(vecs, matrix)

    @classmethod
    def from_matrix(cls, matrix: Matrix) -> "BasisSet":
        if not matrix.is_square:
            raise ShapeError("basis matrix must be square")
        return cls.from_vectors([matrix.column(j) for j in range(matrix.cols)])

    @classmethod
    def standard(cls, n: int) -> "BasisSet":
        return cls.from_matrix(Matrix.identity(n))

    @property
    def dim(self) -> int:
        return self.as_matrix.rows


def invert_traced(matrix: Matrix, tol: Optional[float] = None) -> tuple[Matrix, StepTrace]:
    """Gauss-Jordan on [A | I]; returns the inverse and the elimination trace."""
    if not matrix.is_square:
        raise ShapeError(f"cannot invert a {matrix.rows}x{matrix.cols} matrix")
    n = matrix.rows
    eye = Matrix.identity(n, matrix.domain)
    augmented = Matrix.from_rows(
        [list(matrix.row(i)) + list(eye.row(i)) for i in range(n)], matrix.domain
    )
    result = rref(augmented, tol=tol)
    pivot_cols = [c for _, c in result.pivots if c < n]
    if len(pivot_cols) < n:
        free = tuple(c for c in range(n) if c not in pivot_cols)
        raise SingularMatrixError(rank=len(pivot_cols), free_cols=free)
    reduced = result.rref
    inverse = Matrix.from_rows(
        [[reduced[i, n + j] for j in range(n)] for i in range(n)], matrix.domain
    )
    return inverse, result.trace


def invert(matrix: Matrix, tol: Optional[float] = None) -> Matrix:
    """A^-1 via the augmented-block method; raises SingularMatrixError with
    the rank and free columns when no inverse exists."""
    return invert_traced(matrix, tol)[0]


def coordinates_in_basis(v: Sequence, basis: BasisSet) -> tuple:
    """Coefficients c with U c = v, exact in the rational domain."""
    if len(v) != basis.dim:
        raise ShapeError(f"vector length {len(v)} vs basis dimension {basis.dim}")
    return invert(basis.as_matrix).apply(v)


def change_of_basis(a_std: Matrix, basis: BasisSet) -> Matrix:
    """Representation of the map in the given basis: U^-1 A U."""
    if not a_std.is_square or a_std.rows != basis.dim:
        raise ShapeError(
            f"map is {a_std.rows}x{a_std.cols}, basis has dimension {basis.dim}"
        )
    u = basis.as_matrix
    if u.domain != a_std.domain:
        u = u.to_float() if a_std.domain == FLOAT_DOMAIN else u
    return invert(u) @ a_std @ u


def eigenbasis_representation(a_std: Matrix, eigvecs: BasisSet, tol: float = 1e-9) -> Matrix:
    """Change of basis into a claimed eigenvector basis.

    Returns the (diagonal) representation; raises NotDiagonalError with the
    off-diagonal residual when the claimed eigenvectors do not diagonalize,
    exactly in the rational domain and up to tol * ||A||_max in float.
    """
    rep = change_of_basis(a_std, eigvecs)
    off = [abs(rep[i, j]) for i in range(rep.rows) for j in range(rep.cols) if i != j]
    residual = max(off) if off else 0
    if a_std.domain == RATIONAL_DOMAIN:
        bound = 0
    else:
        bound = tol * max(1.0, float(a_std.max_norm()))
    if residual > bound:
        raise NotDiagonalError(residual=residual, representation=rep)
    return rep
