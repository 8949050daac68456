"""Triangular and orthogonal factorizations, and determinants built on them.

LU (with row exchanges counted for the determinant sign), the permutation-sum
determinant kept as a small-n cross-check oracle, Householder QR with explicit
Q, Givens rotations, the classical Gram-Schmidt recurrence preserved as a
measured negative exemplar, and QR-based least squares.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionTooLargeError,
    DomainMismatchError,
    RankDeficientError,
    ShapeError,
    ZeroPivotError,
)
from .matrix import Matrix
from .scalars import FLOAT_DOMAIN, RATIONAL_DOMAIN

PERMUTATION_ORACLE_LIMIT = 8


# -- LU (the LR factorization) ----------------------------------------------


@dataclass(frozen=True)
class LuFactors:
    """P A = L R with unit-lower-triangular L and the swap count ex."""

    l: Matrix
    r: Matrix
    perm: tuple[int, ...]
    exchange_count: int

    def permutation_matrix(self) -> Matrix:
        n = len(self.perm)
        return Matrix.from_rows(
            [[1 if j == self.perm[i] else 0 for j in range(n)] for i in range(n)],
            self.l.domain,
        )


def _default_lu_pivoting(domain: str) -> str:
    # exactness needs no magnitude pivoting; floats want the usual partial
    return "first_nonzero" if domain == RATIONAL_DOMAIN else "partial"


def lu(matrix: Matrix, pivoting: Optional[str] = None) -> LuFactors:
    """Gaussian elimination as a factorization; row swaps recorded in perm/ex.

    pivoting: "none" (raise on an unavoidable zero pivot), "partial"
    (largest magnitude), or "first_nonzero" (topmost usable row). The default
    depends on the domain.
    """
    if not matrix.is_square:
        raise ShapeError(f"LU needs a square matrix, got {matrix.rows}x{matrix.cols}")
    if pivoting is None:
        pivoting = _default_lu_pivoting(matrix.domain)
    if pivoting not in ("none", "partial", "first_nonzero"):
        raise ShapeError(f"unknown pivoting mode {pivoting!r}")
    n = matrix.rows
    exact = matrix.domain == RATIONAL_DOMAIN
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    work = matrix.row_lists()
    lower = [[one if i == j else zero for j in range(n)] for i in range(n)]
    perm = list(range(n))
    exchanges = 0
    for k in range(n):
        chosen = k
        if pivoting == "partial":
            chosen = max(range(k, n), key=lambda r: abs(work[r][k]))
        elif pivoting == "first_nonzero":
            chosen = next((r for r in range(k, n) if work[r][k] != 0), k)
        if work[chosen][k] == 0:
            if any(work[r][k] != 0 for r in range(k, n)):
                raise ZeroPivotError(k, k)
            continue
        if chosen != k:
            work[k], work[chosen] = work[chosen], work[k]
            perm[k], perm[chosen] = perm[chosen], perm[k]
            for c in range(k):
                lower[k][c], lower[chosen][c] = lower[chosen][c], lower[k][c]
            exchanges += 1
        pivot = work[k][k]
        for r in range(k + 1, n):
            if work[r][k] == 0:
                continue
            factor = work[r][k] / pivot
            lower[r][k] = factor
            row = work[r]
            src = work[k]
            for c in range(k, n):
                row[c] = row[c] - factor * src[c]
            row[k] = zero
    return LuFactors(
        l=Matrix.from_rows(lower, matrix.domain),
        r=Matrix.from_rows(work, matrix.domain),
        perm=tuple(perm),
        exchange_count=exchanges,
    )


def det_via_lu(matrix: Matrix) -> Union[Fraction, float]:
    """det(A) = (-1)^ex * product of R's diagonal; exact in the rational domain."""
    factors = lu(matrix)
    det = Fraction(1) if matrix.domain == RATIONAL_DOMAIN else 1.0
    for i in range(matrix.rows):
        det = det * factors.r[i, i]
    return -det if factors.exchange_count % 2 else det


def _permutation_sign(sigma: Sequence[int]) -> int:
    seen = [False] * len(sigma)
    cycles = 0
    for start in range(len(sigma)):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
    return 1 if (len(sigma) - cycles) % 2 == 0 else -1


def det_permutation_oracle(matrix: Matrix, limit: int = PERMUTATION_ORACLE_LIMIT):
    """Sum of signed products over all n! permutations.

    The independent cross-check for det_via_lu. Capped: n! enumeration is
    unrealizable beyond small n, and that refusal is part of the lesson.
    """
    if not matrix.is_square:
        raise ShapeError("determinant needs a square matrix")
    n = matrix.rows
    if n > limit:
        raise DimensionTooLargeError(n, limit)
    total = Fraction(0) if matrix.domain == RATIONAL_DOMAIN else 0.0
    flat = matrix.entries
    for sigma in itertools.permutations(range(n)):
        product = flat[sigma[0]]
        for i in range(1, n):
            product = product * flat[i * n + sigma[i]]
        total = total + product if _permutation_sign(sigma) > 0 else total - product
    return total


# -- Householder QR ------------------------------------------------------------


@dataclass(frozen=True)
class HouseholderReflector:
    """I - beta v v^T acting on rows offset.., stored with v[0] = 1."""

    offset: int
    v: tuple[float, ...]
    beta: float


@dataclass(frozen=True)
class QrFactors:
    q: Matrix
    r: Matrix
    reflectors: tuple[HouseholderReflector, ...]


def _require_float(matrix: Matrix, what: str):
    if matrix.domain != FLOAT_DOMAIN:
        raise DomainMismatchError(f"{what} works in the float domain; call to_float() first")


def householder_qr(matrix: Matrix) -> QrFactors:
    """Full QR by Householder reflections, Q materialized explicitly.

    Reflector signs are chosen as alpha = -sign(x1) * ||x|| so the leading
    entry of v never cancels.
    """
    _require_float(matrix, "householder_qr")
    m, n = matrix.rows, matrix.cols
    if m < n:
        raise ShapeError(f"QR expects rows >= cols, got {m}x{n}")
    r = matrix.to_numpy()
    q = np.eye(m)
    reflectors = []
    for k in range(min(n, m - 1)):
        x = r[k:, k].copy()
        if not np.any(x[1:]):
            continue  # nothing below the diagonal to annihilate
        norm_x = float(np.sqrt(np.dot(x, x)))
        sign = -1.0 if x[0] < 0 else 1.0
        alpha = -sign * norm_x
        v = x
        v[0] -= alpha
        beta = 2.0 / float(np.dot(v, v))
        r[k:, k:] -= beta * np.outer(v, v @ r[k:, k:])
        r[k + 1 :, k] = 0.0
        q[:, k:] -= beta * np.outer(q[:, k:] @ v, v)
        v0 = v[0]
        reflectors.append(
            HouseholderReflector(
                offset=k,
                v=tuple(float(c / v0) for c in v),
                beta=float(beta * v0 * v0),
            )
        )
    return QrFactors(
        q=Matrix.from_numpy(q),
        r=Matrix.from_numpy(np.triu(r)),
        reflectors=tuple(reflectors),
    )


def givens(n: int, i: int, j: int, theta: float) -> Matrix:
    """Planar rotation by theta embedded in n dimensions at rows/cols (i, j)."""
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ShapeError(f"givens needs two distinct indices below {n}, got ({i}, {j})")
    c, s = math.cos(theta), math.sin(theta)
    rows = [[1.0 if a == b else 0.0 for b in range(n)] for a in range(n)]
    rows[i][i] = c
    rows[j][j] = c
    rows[i][j] = -s
    rows[j][i] = s
    return Matrix.from_rows(rows, FLOAT_DOMAIN)


# -- classical Gram-Schmidt (the measured negative exemplar) -------------------


@dataclass(frozen=True)
class GramSchmidtFactors:
    q: Matrix
    r: Matrix


def classical_gram_schmidt(matrix: Matrix) -> GramSchmidtFactors:
    """The classical (not modified) recurrence: every projection coefficient
    is taken against the original column. No orthogonality guarantee; this
    exists to be measured against householder_qr."""
    _require_float(matrix, "classical_gram_schmidt")
    m, n = matrix.rows, matrix.cols
    a = matrix.to_numpy()
    q = np.zeros((m, n))
    r = np.zeros((n, n))
    for k in range(n):
        v = a[:, k].copy()
        for i in range(k):
            r[i, k] = float(np.dot(q[:, i], a[:, k]))
            v -= r[i, k] * q[:, i]
        r[k, k] = float(np.sqrt(np.dot(v, v)))
        if r[k, k] == 0.0:
            raise RankDeficientError(k, 0.0)
        q[:, k] = v / r[k, k]
    return GramSchmidtFactors(q=Matrix.from_numpy(q), r=Matrix.from_numpy(r))


def orthogonality_deviation(q: Matrix) -> float:
    """Max-entry distance of Q^T Q from the identity (works for thin Q too)."""
    _require_float(q, "orthogonality_deviation")
    arr = q.to_numpy()
    gram = arr.T @ arr
    return float(np.max(np.abs(gram - np.eye(q.cols))))


@dataclass(frozen=True)
class GsComparison:
    gram_schmidt_deviation: float
    householder_deviation: float

    @property
    def ratio(self) -> float:
        if self.householder_deviation == 0.0:
            return float("inf")
        return self.gram_schmidt_deviation / self.householder_deviation


def gs_compare(matrix: Matrix) -> GsComparison:
    """Orthogonality loss of classical Gram-Schmidt next to Householder QR."""
    cgs = classical_gram_schmidt(matrix)
    hh = householder_qr(matrix)
    return GsComparison(
        gram_schmidt_deviation=orthogonality_deviation(cgs.q),
        householder_deviation=orthogonality_deviation(hh.q),
    )


def hilbert_matrix(n: int) -> Matrix:
    """The classic ill-conditioned demo matrix: entries 1/(i+j+1)."""
    return Matrix.from_rows(
        [[1.0 / (i + j + 1) for j in range(n)] for i in range(n)], FLOAT_DOMAIN
    )


# -- least squares ----------------------------------------------------------------


@dataclass(frozen=True)
class LeastSquaresResult:
    x: tuple[float, ...]
    residual_norm: float


RANK_DEFICIENT_REL_TOL = 1e-10


def least_squares(matrix: Matrix, b: Sequence[float]) -> LeastSquaresResult:
    """Minimize ||A x - b||_2 through the QR route: x = R^-1 (Q^T b)[:n]."""
    _require_float(matrix, "least_squares")
    m, n = matrix.rows, matrix.cols
    if len(b) != m:
        raise ShapeError(f"right-hand side length {len(b)} vs {m} rows")
    factors = householder_qr(matrix)
    r = factors.r.to_numpy()
    threshold = RANK_DEFICIENT_REL_TOL * max(1.0, float(matrix.max_norm()))
    for i in range(n):
        if abs(r[i, i]) <= threshold:
            raise RankDeficientError(i, abs(float(r[i, i])))
    qtb = factors.q.to_numpy().T @ np.asarray([float(v) for v in b])
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (qtb[i] - float(np.dot(r[i, i + 1 :], x[i + 1 :]))) / r[i, i]
    residual = np.asarray([float(v) for v in b]) - matrix.to_numpy() @ x
    return LeastSquaresResult(
        x=tuple(float(v) for v in x),
        residual_norm=float(np.sqrt(np.dot(residual, residual))),
    )
