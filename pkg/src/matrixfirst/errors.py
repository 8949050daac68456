"""Exception hierarchy for the engine.

Every error raised on purpose by this package derives from LinalgError so
callers (CLI, HTTP layer) can map domain failures to exit codes / status
codes without catching bare exceptions.
"""

from __future__ import annotations


class LinalgError(Exception):
    """Base class for all engine errors."""


class ParseError(LinalgError):
    """Malformed matrix, vector, or scalar token input."""


class ShapeError(LinalgError):
    """Operands have incompatible shapes for the requested operation."""


class DomainMismatchError(LinalgError):
    """Mixing rational-domain and float-domain values in one operation."""


class SingularMatrixError(LinalgError):
    """Matrix is not invertible; carries the rank and free columns found."""

    def __init__(self, rank: int, free_cols: tuple[int, ...]):
        self.rank = rank
        self.free_cols = tuple(free_cols)
        super().__init__(
            f"singular matrix: rank {rank}, free columns {list(self.free_cols)}"
        )


class ZeroPivotError(LinalgError):
    """LU without pivoting hit a zero pivot it cannot eliminate past."""

    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"zero pivot at ({row}, {col}) with pivoting disabled")


class DimensionTooLargeError(LinalgError):
    """Permutation-sum determinant refused: n! terms are unrealizable."""

    def __init__(self, n: int, limit: int = 8):
        self.n = n
        self.limit = limit
        super().__init__(
            f"n = {n} exceeds the n! expansion cap ({limit}); "
            f"direct expansion is unrealizable at this size"
        )


class RankDeficientError(LinalgError):
    """Least-squares input does not have full column rank."""

    def __init__(self, col: int, value: float):
        self.col = col
        self.value = value
        super().__init__(f"rank deficient: |R[{col},{col}]| = {value:.3e} below threshold")


class NotDiagonalError(LinalgError):
    """Claimed eigenvector basis failed to diagonalize the matrix."""

    def __init__(self, residual, representation=None):
        self.residual = residual
        self.representation = representation
        super().__init__(f"basis does not diagonalize: off-diagonal residual {residual}")


class EmptyEigenspaceError(LinalgError):
    """The shifted matrix has no nullspace at the working tolerance."""

    def __init__(self, eigenvalue):
        self.eigenvalue = eigenvalue
        super().__init__(f"{eigenvalue} is not an eigenvalue at the working tolerance")


class NoConvergenceError(LinalgError):
    """QR iteration ran out of sweeps; carries the partial deflation state."""

    def __init__(self, sweeps: int, partial=None):
        self.sweeps = sweeps
        self.partial = partial
        super().__init__(f"QR iteration did not converge within {sweeps} sweeps")


class SpanContainmentError(LinalgError):
    """A hypothesis of the size-bound theorem is violated: S is not inside the span."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"vector {index} of S lies outside the given span")


class UnknownSessionError(LinalgError):
    """No live session with the given id (missing or expired)."""

    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session: {session_id}")


class GoalReachedError(LinalgError):
    """A hint was requested for a session that already reached its goal."""

    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"session {session_id} already reached its goal")
