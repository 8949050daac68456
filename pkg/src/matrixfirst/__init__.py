"""matrixfirst: a matrix-first linear algebra engine.

Exact rational row reduction and factorizations, Krylov minimal polynomials,
shifted-QR eigenvalues, and an interactive lesson-bench session service.
"""

from .basis import BasisSet, change_of_basis, coordinates_in_basis, eigenbasis_representation, invert
from .echelon import (
    AddMultiple,
    RefResult,
    RowOp,
    Scale,
    StepTrace,
    Swap,
    apply_rowop,
    basis_check,
    in_span,
    independence_size_bound,
    is_independent,
    nullspace_basis,
    ref,
    rref,
    solve,
    span_equals,
)
from .eigen import (
    EigenResult,
    KrylovResult,
    charpoly_cost_demo,
    eigenvectors_for,
    francis_qr_eigenvalues,
    hessenberg,
    krylov_annihilator,
    minimal_polynomial,
)
from .errors import LinalgError
from .factor import (
    LuFactors,
    QrFactors,
    classical_gram_schmidt,
    det_permutation_oracle,
    det_via_lu,
    givens,
    gs_compare,
    householder_qr,
    least_squares,
    lu,
)
from .matrix import (
    LinearMapProbe,
    Matrix,
    dot_norm_angle,
    is_orthogonal,
    linearity_probe,
    rotation2d,
    standard_matrix,
)
from .poly import Polynomial, format_poly, poly_eval_matrix, poly_gcd_lcm
from .scalars import Rational, format_rational, parse_rational

__version__ = "0.1.0"
