"""Dense matrices over two scalar domains, and the geometry of maps.

A Matrix is immutable, row-major, and tagged with its scalar domain:
"rational" entries are `fractions.Fraction` (exact), "float" entries are
finite IEEE doubles. Conversion is explicit and only rational -> float;
mixing domains in arithmetic raises instead of promoting.

Vectors at API boundaries are plain sequences of scalars.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import DomainMismatchError, ParseError, ShapeError
from .scalars import (
    FLOAT_DOMAIN,
    RATIONAL_DOMAIN,
    check_finite,
    format_rational,
    parse_float,
    parse_rational,
)


def _coerce_entry(value, domain: str):
    if domain == RATIONAL_DOMAIN:
        if isinstance(value, float):
            raise DomainMismatchError(
                f"float entry {value!r} in a rational matrix; convert explicitly"
            )
        return Fraction(value)
    return check_finite(float(value))


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple
    domain: str

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ShapeError(f"matrix needs positive shape, got {self.rows}x{self.cols}")
        if self.domain not in (RATIONAL_DOMAIN, FLOAT_DOMAIN):
            raise ParseError(f"unknown scalar domain {self.domain!r}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], domain: str = RATIONAL_DOMAIN) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ShapeError("matrix needs at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("ragged rows")
        flat = tuple(_coerce_entry(v, domain) for r in rows for v in r)
        return cls(len(rows), width, flat, domain)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], domain: str = RATIONAL_DOMAIN) -> "Matrix":
        cols = [list(c) for c in columns]
        if not cols or not cols[0]:
            raise ShapeError("need at least one column vector with at least one entry")
        height = len(cols[0])
        if any(len(c) != height for c in cols):
            raise ShapeError("column vectors differ in length")
        return cls.from_rows(
            [[cols[j][i] for j in range(len(cols))] for i in range(height)], domain
        )

    @classmethod
    def identity(cls, n: int, domain: str = RATIONAL_DOMAIN) -> "Matrix":
        return cls.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)], domain
        )

    @classmethod
    def zeros(cls, rows: int, cols: int, domain: str = RATIONAL_DOMAIN) -> "Matrix":
        return cls.from_rows([[0] * cols for _ in range(rows)], domain)

    @classmethod
    def from_numpy(cls, array) -> "Matrix":
        return cls.from_rows([[float(v) for v in row] for row in array], FLOAT_DOMAIN)

    # -- access -----------------------------------------------------------

    def __getitem__(self, key: tuple[int, int]):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise ShapeError(f"index ({i}, {j}) out of range for {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_lists(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def max_norm(self):
        """Largest absolute entry; 0 for the zero matrix."""
        return max(abs(e) for e in self.entries)

    def trace(self):
        if not self.is_square:
            raise ShapeError("trace needs a square matrix")
        return sum(self[i, i] for i in range(self.rows))

    # -- arithmetic ---------------------------------------------------------

    def _check_domain(self, other: "Matrix"):
        if self.domain != other.domain:
            raise DomainMismatchError(
                f"cannot mix {self.domain} and {other.domain} matrices"
            )

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_domain(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError(
                f"cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}"
            )
        return Matrix(
            self.rows,
            self.cols,
            tuple(a + b for a, b in zip(self.entries, other.entries)),
            self.domain,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_domain(other)
        if self.cols != other.rows:
            raise ShapeError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        out = []
        for i in range(self.rows):
            lhs_row = self.row(i)
            for j in range(other.cols):
                out.append(
                    sum(lhs_row[k] * other.entries[k * other.cols + j] for k in range(self.cols))
                )
        return Matrix(self.rows, other.cols, tuple(out), self.domain)

    def scale(self, factor) -> "Matrix":
        if self.domain == RATIONAL_DOMAIN:
            if isinstance(factor, float):
                raise DomainMismatchError("float scalar on a rational matrix")
            factor = Fraction(factor)
        else:
            factor = float(factor)
        return Matrix(
            self.rows, self.cols, tuple(factor * e for e in self.entries), self.domain
        )

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def transpose(self) -> "Matrix":
        return Matrix(
            self.cols,
            self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
            self.domain,
        )

    def apply(self, vector: Sequence) -> tuple:
        """Matrix-vector product as a plain tuple."""
        v = list(vector)
        if len(v) != self.cols:
            raise ShapeError(f"vector length {len(v)} vs {self.cols} columns")
        if self.domain == RATIONAL_DOMAIN:
            v = [Fraction(x) for x in v]
        else:
            v = [float(x) for x in v]
        return tuple(
            sum(self.entries[i * self.cols + k] * v[k] for k in range(self.cols))
            for i in range(self.rows)
        )

    # -- conversion ---------------------------------------------------------

    def to_float(self) -> "Matrix":
        """Lossy rational -> float conversion; the only permitted direction."""
        if self.domain == FLOAT_DOMAIN:
            return self
        return Matrix(self.rows, self.cols, tuple(float(e) for e in self.entries), FLOAT_DOMAIN)

    def to_numpy(self):
        import numpy as np

        if self.domain != FLOAT_DOMAIN:
            raise DomainMismatchError("to_numpy is float-domain only; call to_float() first")
        return np.array(self.row_lists(), dtype=float)

    # -- text formats ---------------------------------------------------------

    def to_json(self) -> dict:
        if self.domain == RATIONAL_DOMAIN:
            data = [[format_rational(e) for e in self.row(i)] for i in range(self.rows)]
        else:
            data = self.row_lists()
        return {"rows": self.rows, "cols": self.cols, "domain": self.domain, "data": data}

    @classmethod
    def from_json(cls, obj, domain: Optional[str] = None) -> "Matrix":
        if not isinstance(obj, dict):
            raise ParseError("matrix JSON must be an object")
        try:
            rows, cols, data = obj["rows"], obj["cols"], obj["data"]
        except KeyError as exc:
            raise ParseError(f"matrix JSON missing key {exc}") from exc
        if domain is None:
            domain = obj.get("domain")
        if domain is None:
            flat = [v for r in data for v in r] if isinstance(data, list) else []
            domain = (
                FLOAT_DOMAIN
                if any(isinstance(v, float) for v in flat)
                else RATIONAL_DOMAIN
            )
        if not isinstance(data, list) or len(data) != rows:
            raise ParseError(f"matrix JSON claims {rows} rows, data has {len(data)}")
        parse = parse_rational if domain == RATIONAL_DOMAIN else parse_float
        parsed = []
        for r in data:
            if not isinstance(r, list) or len(r) != cols:
                raise ParseError(f"matrix JSON claims {cols} cols, a row has {len(r)}")
            parsed.append([parse(v) for v in r])
        return cls.from_rows(parsed, domain)

    def to_csv(self) -> str:
        fmt = format_rational if self.domain == RATIONAL_DOMAIN else repr
        return "\n".join(
            ",".join(fmt(e) for e in self.row(i)) for i in range(self.rows)
        ) + "\n"

    @classmethod
    def from_csv(cls, text: str, domain: str = RATIONAL_DOMAIN) -> "Matrix":
        parse = parse_rational if domain == RATIONAL_DOMAIN else parse_float
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            rows.append([parse(tok) for tok in line.split(",")])
        if not rows:
            raise ParseError("empty matrix input")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ParseError("ragged CSV rows")
        return cls.from_rows(rows, domain)

    def __str__(self) -> str:
        fmt = format_rational if self.domain == RATIONAL_DOMAIN else "{:.6g}".format
        widths = [
            max(len(fmt(self[i, j])) for i in range(self.rows)) for j in range(self.cols)
        ]
        return "\n".join(
            "[ " + "  ".join(fmt(self[i, j]).rjust(widths[j]) for j in range(self.cols)) + " ]"
            for i in range(self.rows)
        )


# -- vector helpers (float domain) ------------------------------------------


def dot(u: Sequence[float], v: Sequence[float]) -> float:
    if len(u) != len(v):
        raise ShapeError(f"vector lengths differ: {len(u)} vs {len(v)}")
    return math.fsum(float(a) * float(b) for a, b in zip(u, v))


def norm(u: Sequence[float]) -> float:
    return math.sqrt(dot(u, u))


# -- linear maps as black boxes ----------------------------------------------


@dataclass(frozen=True)
class LinearMapProbe:
    """A function R^dim_in -> R^dim_out observed only through evaluation."""

    dim_in: int
    dim_out: int
    eval: Callable[[Sequence[float]], Sequence[float]]

    def __call__(self, u: Sequence[float]) -> tuple[float, ...]:
        out = tuple(float(x) for x in self.eval(u))
        if len(out) != self.dim_out:
            raise ShapeError(
                f"map returned a vector of length {len(out)}, expected {self.dim_out}"
            )
        return out


def standard_matrix(f: LinearMapProbe) -> Matrix:
    """Column i is f(e_i): the matrix that represents f when f is linear."""
    columns = []
    for i in range(f.dim_in):
        e = [0.0] * f.dim_in
        e[i] = 1.0
        columns.append(f(e))
    return Matrix.from_columns(columns, FLOAT_DOMAIN)


@dataclass(frozen=True)
class LinearityReport:
    linear_up_to_tol: bool
    max_violation: float
    counterexample: Optional[dict] = None


def linearity_probe(
    f: LinearMapProbe, trials: int, seed: int, tol: float = 1e-9
) -> LinearityReport:
    """Sample f(a*u + b*v) against a*f(u) + b*f(v) and report the worst miss.

    The violation is measured relative to the magnitude of the compared
    values (floored at 1), so scaling the map does not change the verdict.
    """
    if trials < 1:
        raise ShapeError("need at least one trial")
    rng = random.Random(seed)
    worst = 0.0
    counterexample = None
    for _ in range(trials):
        u = [rng.uniform(-1, 1) for _ in range(f.dim_in)]
        v = [rng.uniform(-1, 1) for _ in range(f.dim_in)]
        a = rng.uniform(-2, 2)
        b = rng.uniform(-2, 2)
        combined = f([a * ui + b * vi for ui, vi in zip(u, v)])
        separate = [a * x + b * y for x, y in zip(f(u), f(v))]
        scale = max(1.0, norm(combined), norm(separate))
        violation = norm([x - y for x, y in zip(combined, separate)]) / scale
        if violation > worst:
            worst = violation
            counterexample = {"u": tuple(u), "v": tuple(v), "alpha": a, "beta": b}
    linear = worst <= tol
    return LinearityReport(
        linear_up_to_tol=linear,
        max_violation=worst,
        counterexample=None if linear else counterexample,
    )


# -- angles, rotations, orthogonality -----------------------------------------


@dataclass(frozen=True)
class GeometryReport:
    dot: float
    norm_u: float
    norm_v: float
    cos_angle: Optional[float]
    cauchy_schwarz_gap: float


def dot_norm_angle(u: Sequence[float], v: Sequence[float]) -> GeometryReport:
    """Inner product geometry of a vector pair; cos_angle is None when a norm is 0."""
    d = dot(u, v)
    nu, nv = norm(u), norm(v)
    gap = nu * nv - abs(d)
    if nu == 0.0 or nv == 0.0:
        cos_angle = None
    else:
        cos_angle = max(-1.0, min(1.0, d / (nu * nv)))
    return GeometryReport(dot=d, norm_u=nu, norm_v=nv, cos_angle=cos_angle, cauchy_schwarz_gap=gap)


def rotation2d(theta: float) -> Matrix:
    c, s = math.cos(theta), math.sin(theta)
    return Matrix.from_rows([[c, -s], [s, c]], FLOAT_DOMAIN)


@dataclass(frozen=True)
class OrthogonalityReport:
    orthogonal: bool
    deviation: float


def is_orthogonal(q: Matrix, tol: float = 1e-12) -> OrthogonalityReport:
    """Max-entry deviation of Q^T Q from the identity."""
    if not q.is_square:
        raise ShapeError("orthogonality check needs a square matrix")
    qf = q.to_float()
    gram = qf.transpose() @ qf
    eye = Matrix.identity(q.rows, FLOAT_DOMAIN)
    deviation = (gram - eye).max_norm()
    return OrthogonalityReport(orthogonal=deviation <= tol, deviation=deviation)
