"""Eigenvalues the matrix way: exact Krylov annihilators up to the minimal
polynomial, then Hessenberg reduction and shifted QR iteration for numeric
eigenvalues. The characteristic polynomial never appears as a method; its
permutation-sum determinant survives only inside the cost demonstration.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .echelon import nullspace_basis, ref, solve, UniqueSolution
from .errors import (
    DimensionTooLargeError,
    DomainMismatchError,
    EmptyEigenspaceError,
    LinalgError,
    NoConvergenceError,
    ShapeError,
)
from .factor import det_permutation_oracle
from .matrix import Matrix
from .poly import Polynomial, poly_eval_matrix, poly_lcm
from .scalars import FLOAT_DOMAIN, RATIONAL_DOMAIN

DEFLATION_REL_TOL = 1e-13
EIGENVECTOR_RESIDUAL_TOL = 1e-8


# -- Krylov iteration and the minimal polynomial --------------------------------


@dataclass(frozen=True)
class KrylovResult:
    """Iterates b, Ab, ..., A^d b, their dependency, and the annihilator."""

    iterates: tuple[tuple, ...]
    dependency: tuple[Fraction, ...]
    annihilator: Polynomial


def _require_rational(matrix: Matrix, what: str):
    if matrix.domain != RATIONAL_DOMAIN:
        raise DomainMismatchError(f"{what} is exact and needs a rational matrix")


def krylov_annihilator(matrix: Matrix, b: Sequence) -> KrylovResult:
    """Grow the iterate matrix one column at a time until the first free
    column appears; read the dependency off the resulting system.

    The new column is always the first dependent one, so the annihilator is
    monic of degree d = number of previously independent iterates.
    """
    _require_rational(matrix, "krylov_annihilator")
    if not matrix.is_square:
        raise ShapeError("Krylov iteration needs a square matrix")
    vec = tuple(Fraction(x) for x in b)
    if len(vec) != matrix.rows:
        raise ShapeError(f"vector length {len(vec)} vs {matrix.rows}")
    if all(x == 0 for x in vec):
        raise ShapeError("Krylov iteration needs b != 0")
    iterates = [vec]
    while True:
        candidate = matrix.apply(iterates[-1])
        columns = Matrix.from_columns([list(v) for v in iterates + [candidate]])
        result = ref(columns)
        if result.rank == len(iterates) + 1:
            iterates.append(candidate)
            continue
        iterates.append(candidate)
        d = len(iterates) - 1
        if d == 0:
            raise LinalgError("b = 0 slipped through")  # unreachable: b != 0
        prefix = Matrix.from_columns([list(v) for v in iterates[:d]])
        solution = solve(prefix, list(candidate))
        assert isinstance(solution, UniqueSolution)
        coeffs = [-x for x in solution.x] + [Fraction(1)]
        annihilator = Polynomial(coeffs)
        return KrylovResult(
            iterates=tuple(iterates),
            dependency=tuple(annihilator.coefficients),
            annihilator=annihilator,
        )


def _divisors(n: int, cap: int = 10**6) -> list[int]:
    n = abs(n)
    out = set()
    i = 1
    while i * i <= n and i <= cap:
        if n % i == 0:
            out.add(i)
            out.add(n // i)
        i += 1
    return sorted(out)


def _rational_roots(p: Polynomial) -> list[Fraction]:
    """All rational roots, by the rational root theorem on the cleared form."""
    roots: list[Fraction] = []
    coeffs = list(p.coefficients)
    if not coeffs:
        return roots
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
        if not roots:
            roots.append(Fraction(0))
    if len(coeffs) <= 1:
        return roots
    stripped = Polynomial(coeffs)
    scale = math.lcm(*(c.denominator for c in coeffs))
    a0 = abs(int(coeffs[0] * scale))
    lead = abs(int(coeffs[-1] * scale))
    for num in _divisors(a0):
        for den in _divisors(lead):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand not in roots and stripped(cand) == 0:
                    roots.append(cand)
    return roots


def minimal_polynomial(matrix: Matrix) -> Polynomial:
    """Least-degree monic p with p(A) = 0, exactly.

    Built as the lcm of the Krylov annihilators of the standard basis
    vectors, stopping early once the accumulated degree reaches n. The
    result is audited: p(A) must vanish and no rational root may divide out
    while preserving annihilation.
    """
    _require_rational(matrix, "minimal_polynomial")
    if not matrix.is_square:
        raise ShapeError("minimal polynomial needs a square matrix")
    n = matrix.rows
    minpoly = Polynomial.one()
    for i in range(n):
        if minpoly.degree >= n:
            break
        e_i = [Fraction(1) if j == i else Fraction(0) for j in range(n)]
        minpoly = poly_lcm(minpoly, krylov_annihilator(matrix, e_i).annihilator)
    zero = Matrix.zeros(n, n)
    if poly_eval_matrix(minpoly, matrix) != zero:
        raise LinalgError("annihilation audit failed for the assembled polynomial")
    for root in _rational_roots(minpoly):
        reduced = minpoly // Polynomial.from_roots(root)
        if poly_eval_matrix(reduced, matrix) == zero:
            raise LinalgError(f"polynomial is not minimal: root {root} divides out")
    return minpoly


# -- Hessenberg reduction ---------------------------------------------------------


@dataclass(frozen=True)
class HessenbergResult:
    h: Matrix
    q: Matrix


def hessenberg(matrix: Matrix) -> HessenbergResult:
    """Householder similarity reduction to upper Hessenberg form: H = Q^T A Q."""
    if matrix.domain != FLOAT_DOMAIN:
        raise DomainMismatchError("hessenberg works in the float domain")
    if not matrix.is_square:
        raise ShapeError("Hessenberg reduction needs a square matrix")
    n = matrix.rows
    h = matrix.to_numpy()
    q = np.eye(n)
    for k in range(n - 2):
        x = h[k + 1 :, k].copy()
        if not np.any(x[1:]):
            continue  # already Hessenberg in this column
        norm_x = float(np.sqrt(np.dot(x, x)))
        sign = -1.0 if x[0] < 0 else 1.0
        v = x
        v[0] += sign * norm_x
        beta = 2.0 / float(np.dot(v, v))
        h[k + 1 :, k:] -= beta * np.outer(v, v @ h[k + 1 :, k:])
        h[:, k + 1 :] -= beta * np.outer(h[:, k + 1 :] @ v, v)
        q[:, k + 1 :] -= beta * np.outer(q[:, k + 1 :] @ v, v)
        h[k + 2 :, k] = 0.0
    return HessenbergResult(h=Matrix.from_numpy(h), q=Matrix.from_numpy(q))


# -- shifted QR iteration -----------------------------------------------------------


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: tuple[complex, ...]
    eigenvectors: tuple[Optional[tuple[float, ...]], ...]
    residuals: tuple[Optional[float], ...]
    iterations_used: int
    block_triangular: Matrix
    transform: Matrix

    def grouped(self, rel_tol: float = 1e-8) -> list[tuple[complex, int]]:
        """Eigenvalues with multiplicities, grouping nearly equal values."""
        groups: list[list[complex]] = []
        for lam in self.eigenvalues:
            for group in groups:
                if abs(lam - group[0]) <= rel_tol * (1.0 + abs(group[0])):
                    group.append(lam)
                    break
            else:
                groups.append([lam])
        return [(g[0], len(g)) for g in groups]


def _two_by_two_eigenvalues(a: float, b: float, c: float, d: float) -> tuple[complex, complex]:
    """Roots of the 2x2 block, with the discriminant handled stably."""
    mid = 0.5 * (a + d)
    half_gap = 0.5 * (a - d)
    disc = half_gap * half_gap + b * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        big = mid + sq if mid >= 0 else mid - sq
        if big == 0.0:
            return complex(0.0), complex(0.0)
        det = a * d - b * c
        return complex(big), complex(det / big)
    sq = math.sqrt(-disc)
    return complex(mid, sq), complex(mid, -sq)


def _rotation(x: float, z: float) -> tuple[float, float]:
    r = math.hypot(x, z)
    if r == 0.0:
        return 1.0, 0.0
    return x / r, z / r


def _qr_sweep(h: np.ndarray, q: np.ndarray, lo: int, hi: int, shift: float):
    """One implicit single-shift QR step on the active block lo..hi."""
    x = h[lo, lo] - shift
    z = h[lo + 1, lo]
    for k in range(lo, hi):
        c, s = _rotation(x, z)
        g = np.array([[c, s], [-s, c]])
        h[k : k + 2, :] = g @ h[k : k + 2, :]
        h[:, k : k + 2] = h[:, k : k + 2] @ g.T
        q[:, k : k + 2] = q[:, k : k + 2] @ g.T
        if k < hi - 1:
            x = h[k + 1, k]
            z = h[k + 2, k]


def _reflect3(h: np.ndarray, q: np.ndarray, k: int, x: float, y: float, z: float):
    """Apply the 3-row Householder reflector sending (x, y, z) to a multiple
    of e1 as a similarity at rows/columns k..k+2."""
    norm = math.sqrt(x * x + y * y + z * z)
    if norm == 0.0:
        return
    alpha = -norm if x >= 0 else norm
    v = np.array([x - alpha, y, z])
    vtv = float(np.dot(v, v))
    if vtv == 0.0:
        return
    beta = 2.0 / vtv
    h[k : k + 3, :] -= beta * np.outer(v, v @ h[k : k + 3, :])
    h[:, k : k + 3] -= beta * np.outer(h[:, k : k + 3] @ v, v)
    q[:, k : k + 3] -= beta * np.outer(q[:, k : k + 3] @ v, v)


def _double_shift_sweep(h: np.ndarray, q: np.ndarray, lo: int, hi: int):
    """One Francis implicit double-shift step on the active block lo..hi
    (size >= 3): real arithmetic even when the trailing pair is complex,
    because only the pair's sum and product enter."""
    s = h[hi - 1, hi - 1] + h[hi, hi]
    p = h[hi - 1, hi - 1] * h[hi, hi] - h[hi - 1, hi] * h[hi, hi - 1]
    x = h[lo, lo] * h[lo, lo] + h[lo, lo + 1] * h[lo + 1, lo] - s * h[lo, lo] + p
    y = h[lo + 1, lo] * (h[lo, lo] + h[lo + 1, lo + 1] - s)
    z = h[lo + 2, lo + 1] * h[lo + 1, lo]
    for k in range(lo, hi - 1):
        _reflect3(h, q, k, x, y, z)
        x = h[k + 1, k]
        y = h[k + 2, k]
        z = h[k + 3, k] if k + 3 <= hi else 0.0
    c, s_rot = _rotation(x, y)
    g = np.array([[c, s_rot], [-s_rot, c]])
    h[hi - 1 : hi + 1, :] = g @ h[hi - 1 : hi + 1, :]
    h[:, hi - 1 : hi + 1] = h[:, hi - 1 : hi + 1] @ g.T
    q[:, hi - 1 : hi + 1] = q[:, hi - 1 : hi + 1] @ g.T
    # the chase leaves O(eps)-sized debris below the subdiagonal; sweep it out
    for i in range(lo + 2, hi + 1):
        h[i, lo : i - 1] = 0.0


def francis_qr_eigenvalues(
    matrix: Matrix,
    max_sweeps: Optional[int] = None,
    want_vectors: bool = True,
    tol: Optional[float] = None,
) -> EigenResult:
    """All eigenvalues by Hessenberg reduction plus Wilkinson-shifted QR.

    Deflation splits the problem whenever a subdiagonal entry is negligible
    next to its diagonal neighbors; surviving 2x2 blocks are resolved by the
    quadratic formula, which is where complex conjugate pairs emerge. An
    exceptional shift breaks the rare cycling block. Raises NoConvergenceError
    with the partial state when the sweep budget runs out.
    """
    if matrix.domain != FLOAT_DOMAIN:
        raise DomainMismatchError("francis_qr_eigenvalues works in the float domain")
    if not matrix.is_square:
        raise ShapeError("eigenvalues need a square matrix")
    n = matrix.rows
    if max_sweeps is None:
        max_sweeps = 30 * n
    reduction = hessenberg(matrix)
    h = reduction.h.to_numpy()
    q = reduction.q.to_numpy()

    def negligible(i: int) -> bool:
        # subdiagonal entry h[i+1, i] against its diagonal neighbors
        bound = DEFLATION_REL_TOL * (abs(h[i, i]) + abs(h[i + 1, i + 1]))
        return abs(h[i + 1, i]) <= bound

    eigenvalues: list[complex] = []
    sweeps = 0
    stagnation = 0
    m = n - 1
    while m >= 0:
        if m == 0:
            eigenvalues.append(complex(h[0, 0]))
            m -= 1
            continue
        if negligible(m - 1):
            h[m, m - 1] = 0.0
            eigenvalues.append(complex(h[m, m]))
            m -= 1
            stagnation = 0
            continue
        if m == 1 or negligible(m - 2):
            if m > 1:
                h[m - 1, m - 2] = 0.0
            eigenvalues.extend(
                _two_by_two_eigenvalues(h[m - 1, m - 1], h[m - 1, m], h[m, m - 1], h[m, m])
            )
            m -= 2
            stagnation = 0
            continue
        if sweeps >= max_sweeps:
            raise NoConvergenceError(
                sweeps,
                partial={
                    "eigenvalues": tuple(eigenvalues),
                    "h": Matrix.from_numpy(h),
                    "q": Matrix.from_numpy(q),
                    "active_end": m,
                },
            )
        lo = m
        while lo > 0 and not negligible(lo - 1):
            lo -= 1
        if lo > 0:
            h[lo, lo - 1] = 0.0
        stagnation += 1
        if stagnation % 11 == 0:
            # exceptional shift to break a cycling active block
            _qr_sweep(h, q, lo, m, h[m, m] + 0.75 * abs(h[m, m - 1]))
        else:
            lam1, lam2 = _two_by_two_eigenvalues(
                h[m - 1, m - 1], h[m - 1, m], h[m, m - 1], h[m, m]
            )
            if lam1.imag == 0.0 and lam2.imag == 0.0:
                # Wilkinson: the trailing-2x2 eigenvalue nearest the corner
                corner = h[m, m]
                shift = (
                    lam1.real
                    if abs(lam1.real - corner) <= abs(lam2.real - corner)
                    else lam2.real
                )
                _qr_sweep(h, q, lo, m, shift)
            else:
                # complex pair: Francis double-shift step keeps arithmetic real
                _double_shift_sweep(h, q, lo, m)
        sweeps += 1

    order = sorted(
        range(n),
        key=lambda i: (-abs(eigenvalues[i]), -eigenvalues[i].real, -eigenvalues[i].imag),
    )
    eigenvalues = [eigenvalues[i] for i in order]

    vectors: list[Optional[tuple[float, ...]]] = [None] * n
    residuals: list[Optional[float]] = [None] * n
    if want_vectors:
        a_np = matrix.to_numpy()
        norm_a = max(1.0, float(matrix.max_norm()))
        seen: list[tuple[complex, int]] = []
        for idx, lam in enumerate(eigenvalues):
            if lam.imag != 0.0:
                continue
            occurrence = 0
            for prev, count in seen:
                if abs(lam - prev) <= 1e-8 * (1.0 + abs(prev)):
                    occurrence = count
                    break
            try:
                basis = eigenvectors_for(matrix, lam.real, tol=tol)
            except EmptyEigenspaceError:
                continue
            vec = basis[occurrence % len(basis)]
            arr = np.asarray(vec)
            residual = float(np.linalg.norm(a_np @ arr - lam.real * arr)) / norm_a
            if residual <= EIGENVECTOR_RESIDUAL_TOL:
                vectors[idx] = vec
                residuals[idx] = residual
            for k, (prev, count) in enumerate(seen):
                if abs(lam - prev) <= 1e-8 * (1.0 + abs(prev)):
                    seen[k] = (prev, count + 1)
                    break
            else:
                seen.append((lam, 1))

    return EigenResult(
        eigenvalues=tuple(eigenvalues),
        eigenvectors=tuple(vectors),
        residuals=tuple(residuals),
        iterations_used=sweeps,
        block_triangular=Matrix.from_numpy(h),
        transform=Matrix.from_numpy(q),
    )


def eigenvectors_for(
    matrix: Matrix, eigenvalue: Union[int, Fraction, float], tol: Optional[float] = None
) -> tuple[tuple, ...]:
    """Eigenspace basis for one eigenvalue: the nullspace of A - lambda I.

    Exact (rational lambda on a rational matrix) or float with the pivot
    threshold; float vectors come back normalized. Raises
    EmptyEigenspaceError when lambda is not an eigenvalue at the working
    tolerance.
    """
    if not matrix.is_square:
        raise ShapeError("eigenspaces need a square matrix")
    if isinstance(eigenvalue, complex):
        if eigenvalue.imag != 0.0:
            raise LinalgError("eigenvector extraction handles real eigenvalues only")
        eigenvalue = eigenvalue.real
    n = matrix.rows
    exact = matrix.domain == RATIONAL_DOMAIN and not isinstance(eigenvalue, float)
    if exact:
        shifted = matrix - Matrix.identity(n).scale(Fraction(eigenvalue))
        basis = nullspace_basis(shifted)
        if not basis:
            raise EmptyEigenspaceError(eigenvalue)
        return basis
    work = matrix.to_float()
    shifted = work - Matrix.identity(n, FLOAT_DOMAIN).scale(float(eigenvalue))
    basis = nullspace_basis(shifted, tol=tol)
    normalized = []
    a_np = work.to_numpy()
    norm_a = max(1.0, float(work.max_norm()))
    for vec in basis:
        arr = np.asarray(vec, dtype=float)
        length = float(np.linalg.norm(arr))
        if length == 0.0:
            continue
        arr = arr / length
        residual = float(np.linalg.norm(a_np @ arr - float(eigenvalue) * arr)) / norm_a
        if residual <= EIGENVECTOR_RESIDUAL_TOL:
            normalized.append(tuple(float(v) for v in arr))
    if not normalized:
        raise EmptyEigenspaceError(eigenvalue)
    return tuple(normalized)


# -- the cost of the determinant road ------------------------------------------------


@dataclass(frozen=True)
class CharpolyCostDemo:
    permutation_terms: int
    wallclock: float


def charpoly_cost_demo(n: int, seed: int = 0) -> CharpolyCostDemo:
    """Time the n!-term determinant expansion on a random integer matrix.

    Exists so students can measure for themselves why the direct
    characteristic-polynomial road was abandoned; refuses n > 8 outright.
    """
    if n < 1:
        raise ShapeError("need n >= 1")
    if n > 8:
        raise DimensionTooLargeError(n, 8)
    rng = random.Random(seed)
    matrix = Matrix.from_rows(
        [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
    )
    start = time.perf_counter()
    det_permutation_oracle(matrix)
    elapsed = time.perf_counter() - start
    return CharpolyCostDemo(permutation_terms=math.factorial(n), wallclock=elapsed)
