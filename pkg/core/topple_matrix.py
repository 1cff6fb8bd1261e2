# core/topple_matrix.py
# Exact integer toppling matrices: determinant, adjugate, validation and rate vectors.

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import sympy

from core.errors import InvalidRateVector, MatrixFormatError, NotTopplingError, SandpileError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]
Rows = Tuple[Vector, ...]


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


@dataclass(frozen=True)
class ToppleMatrix:
    """
    An n×n integer matrix Δ with cached determinant and adjugate.

    Construction only checks shape. Whether Δ is a toppling matrix is decided
    by validate_toppling(); the result is cached on the instance as `report`.
    Vertices are 1-based in every public operation; `entries` is plain
    0-based row-major storage.
    """
    entries: Rows

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if not rows:
            raise MatrixFormatError("matrix must have at least one row")
        n = len(rows)
        for index, row in enumerate(rows, start=1):
            if len(row) != n:
                raise MatrixFormatError(f"row {index} has length {len(row)}, expected {n}")
            for value in row:
                if not _is_int(value):
                    raise MatrixFormatError(f"row {index} holds non-integer entry {value!r}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "ToppleMatrix":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.entries)

    @cached_property
    def det(self) -> int:
        return determinant(self)

    @cached_property
    def adj(self) -> Rows:
        return adjugate(self)

    @cached_property
    def report(self) -> "ValidationReport":
        return validate_toppling(self)

    @property
    def is_toppling(self) -> bool:
        return self.report.is_toppling

    def require_toppling(self) -> None:
        """Raise NotTopplingError unless the matrix passed validation."""
        if not self.is_toppling:
            raise NotTopplingError("; ".join(self.report.violations))

    def entry(self, i: int, j: int) -> int:
        """Δ_ij with 1-based indices."""
        return self.entries[i - 1][j - 1]

    def row(self, i: int) -> Vector:
        """Row Δ_i (1-based)."""
        return self.entries[i - 1]

    def column(self, j: int) -> Vector:
        """Column Δ^j (1-based)."""
        return tuple(row[j - 1] for row in self.entries)

    @property
    def diagonal(self) -> Vector:
        return tuple(self.entries[i][i] for i in range(self.n))

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "rows": [list(row) for row in self.entries]}


@dataclass(frozen=True)
class RateVector:
    """A positive integer vector r with rΔ ≥ 0, plus c = rΔ and m = Σ rᵢ."""
    r: Vector
    c: Vector
    m: int

    @classmethod
    def of(cls, matrix: ToppleMatrix, r: Sequence[int]) -> "RateVector":
        """Build a RateVector for `matrix`, raising InvalidRateVector if r is not one."""
        r = tuple(r)
        if not is_rate_vector(matrix, r):
            raise InvalidRateVector(f"{r} is not a rate vector: rΔ = {row_times(r, matrix)}")
        return cls(r=r, c=row_times(r, matrix), m=sum(r))

    def scaled(self, matrix: ToppleMatrix, factor: int) -> "RateVector":
        return RateVector.of(matrix, tuple(factor * x for x in self.r))

    def plus(self, matrix: ToppleMatrix, other: "RateVector") -> "RateVector":
        return RateVector.of(matrix, tuple(a + b for a, b in zip(self.r, other.r)))

    def to_json(self) -> Dict[str, Any]:
        return {"r": list(self.r), "c": list(self.c), "m": self.m}


@dataclass
class ValidationReport:
    """Outcome of validate_toppling; violations is empty iff is_toppling."""
    is_toppling: bool
    det: int
    row_certificate: Optional[RateVector] = None
    column_certificate: Optional[Vector] = None
    violations: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "is_toppling": self.is_toppling,
            "det": self.det,
            "row_certificate": self.row_certificate.to_json() if self.row_certificate else None,
            "column_certificate": list(self.column_certificate) if self.column_certificate else None,
            "violations": list(self.violations),
        }


def row_times(x: Sequence[int], matrix: ToppleMatrix) -> Vector:
    """Row vector times matrix, xΔ."""
    n = matrix.n
    return tuple(sum(x[i] * matrix.entries[i][j] for i in range(n)) for j in range(n))


def times_column(rows: Sequence[Sequence[int]], h: Sequence[int]) -> Vector:
    """Matrix times column vector."""
    return tuple(sum(a * b for a, b in zip(row, h)) for row in rows)


def _sympy_matrix(matrix: ToppleMatrix) -> sympy.Matrix:
    return sympy.Matrix([list(row) for row in matrix.entries])


def determinant(matrix: ToppleMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    return int(_sympy_matrix(matrix).det(method="bareiss"))


def adjugate(matrix: ToppleMatrix) -> Rows:
    """
    Exact adjugate, checked against Δ·adj(Δ) = det(Δ)·I before returning.

    Raises:
        SandpileError: if the identity fails, which would mean a bug in the
            underlying arithmetic rather than bad input.
    """
    n = matrix.n
    if n == 1:
        adj = ((1,),)
    else:
        cofactors = _sympy_matrix(matrix).adjugate(method="bareiss")
        adj = tuple(tuple(int(cofactors[i, j]) for j in range(n)) for i in range(n))

    det = matrix.det
    for i in range(n):
        for j in range(n):
            value = sum(matrix.entries[i][k] * adj[k][j] for k in range(n))
            if value != (det if i == j else 0):
                raise SandpileError(f"adjugate identity failed at ({i + 1},{j + 1})")
    return adj


def validate_toppling(matrix: ToppleMatrix) -> ValidationReport:
    """
    Decide whether Δ is a toppling matrix via the adjugate characterization:
    off-diagonal entries ≤ 0, det > 0, and adj(Δ) has a positive diagonal and
    nonnegative entries.

    Stages run cheapest first and stop at the first failing stage, so the
    violations name the cheapest failing condition. On success both
    certificates are attached: r = 1·adj(Δ) (rΔ = det·1) and h = adj(Δ)·1ᵀ
    (Δh = det·1ᵀ).
    """
    n = matrix.n
    det = matrix.det
    violations = []

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and matrix.entry(i, j) > 0:
                violations.append(f"off-diagonal entry Δ[{i},{j}] = {matrix.entry(i, j)} is positive")
    if violations:
        logger.debug(f"Validation stopped at off-diagonal signs: {len(violations)} violations")
        return ValidationReport(is_toppling=False, det=det, violations=violations)

    if det <= 0:
        violations.append(f"determinant {det} is not positive")
        return ValidationReport(is_toppling=False, det=det, violations=violations)

    adj = matrix.adj
    for i in range(n):
        for j in range(n):
            value = adj[i][j]
            if i == j and value <= 0:
                violations.append(f"adjugate diagonal A[{i + 1},{j + 1}] = {value} is not positive")
            elif i != j and value < 0:
                violations.append(f"adjugate entry A[{i + 1},{j + 1}] = {value} is negative")
    if violations:
        return ValidationReport(is_toppling=False, det=det, violations=violations)

    r = tuple(sum(adj[i][j] for i in range(n)) for j in range(n))
    h = tuple(sum(adj[i]) for i in range(n))
    c = row_times(r, matrix)
    expected = (det,) * n
    # rΔ = det·1 and Δh = det·1ᵀ follow from Δ·adj = adj·Δ = det·I
    if c != expected:
        raise SandpileError(f"row certificate {r} gives rΔ = {c}, expected {expected}")
    if times_column(matrix.entries, h) != expected:
        raise SandpileError(f"column certificate {h} gives Δh = {times_column(matrix.entries, h)}")
    report = ValidationReport(
        is_toppling=True,
        det=det,
        row_certificate=RateVector(r=r, c=c, m=sum(r)),
        column_certificate=h,
    )
    logger.debug(f"Validated toppling matrix n={n}, det={det}, r={r}, h={h}")
    return report


def toppling_matrix(rows: Iterable[Iterable[int]]) -> ToppleMatrix:
    """Build a matrix and insist that it is toppling."""
    matrix = ToppleMatrix.from_rows(rows)
    matrix.require_toppling()
    return matrix


def is_rate_vector(matrix: ToppleMatrix, r: Sequence[int]) -> bool:
    """True iff every rᵢ > 0 and every component of rΔ is ≥ 0."""
    if len(r) != matrix.n:
        raise InvalidRateVector(f"rate vector has length {len(r)}, matrix has n={matrix.n}")
    if any(x <= 0 for x in r):
        return False
    return all(c >= 0 for c in row_times(r, matrix))


def canonical_rate(matrix: ToppleMatrix) -> RateVector:
    """r = 1·adj(Δ), which gives rΔ = det(Δ)·1."""
    matrix.require_toppling()
    return matrix.report.row_certificate


def primitive_rate(matrix: ToppleMatrix) -> RateVector:
    """The canonical rate vector divided by the gcd of its entries."""
    r = canonical_rate(matrix).r
    g = reduce(math.gcd, r)
    return RateVector.of(matrix, tuple(x // g for x in r))


def alternative_rates(matrix: ToppleMatrix) -> List[RateVector]:
    """Canonical r, 2·r, and r + e₁·adj(Δ); three distinct members of R(Δ)."""
    base = canonical_rate(matrix)
    first_adj_row = matrix.adj[0]
    return [
        base,
        base.scaled(matrix, 2),
        RateVector.of(matrix, tuple(a + b for a, b in zip(base.r, first_adj_row))),
    ]


def enumerate_rate_vectors(matrix: ToppleMatrix, bound: int) -> Iterator[RateVector]:
    """Every rate vector with entries in [1, bound], in lexicographic order."""
    for r in itertools.product(range(1, bound + 1), repeat=matrix.n):
        if is_rate_vector(matrix, r):
            yield RateVector.of(matrix, r)


def _check_subset(matrix: ToppleMatrix, subset: Iterable[int]) -> Tuple[int, ...]:
    indices = tuple(sorted(set(subset)))
    if not indices:
        raise ValueError("index subset must be nonempty")
    for i in indices:
        if not 1 <= i <= matrix.n:
            raise ValueError(f"index {i} outside 1..{matrix.n}")
    return indices


def submatrix(matrix: ToppleMatrix, subset: Iterable[int]) -> ToppleMatrix:
    """The principal submatrix Δ[I] (I is a set of 1-based indices)."""
    indices = _check_subset(matrix, subset)
    return ToppleMatrix.from_rows(
        [[matrix.entry(i, j) for j in indices] for i in indices]
    )


def principal_minor(matrix: ToppleMatrix, subset: Iterable[int]) -> int:
    """det Δ[I] for a nonempty subset I."""
    return submatrix(matrix, subset).det


def nonempty_subsets(n: int) -> Iterator[Tuple[int, ...]]:
    for size in range(1, n + 1):
        yield from itertools.combinations(range(1, n + 1), size)


def transpose(matrix: ToppleMatrix) -> ToppleMatrix:
    return ToppleMatrix.from_rows(zip(*matrix.entries))


def d_cap(matrix: ToppleMatrix) -> Vector:
    """d = (Δ₁₁−1, …, Δₙₙ−1)."""
    return tuple(x - 1 for x in matrix.diagonal)


def satisfies_conditions(matrix: ToppleMatrix, r: Sequence[int]) -> bool:
    """
    The defining conditions checked against an explicit witness r:
    det ≠ 0, off-diagonal entries ≤ 0, r > 0 and rΔ ≥ 0.
    """
    n = matrix.n
    if matrix.det == 0:
        return False
    if any(matrix.entries[i][j] > 0 for i in range(n) for j in range(n) if i != j):
        return False
    return is_rate_vector(matrix, r)


def all_principal_submatrices_toppling(matrix: ToppleMatrix) -> bool:
    """True iff every nonempty principal submatrix Δ[I] is itself toppling."""
    return all(submatrix(matrix, subset).is_toppling for subset in nonempty_subsets(matrix.n))


def matrix_from_json(data: Any) -> ToppleMatrix:
    """Parse {"n": int, "rows": [[int, ...], ...]} into a ToppleMatrix."""
    if not isinstance(data, dict) or "rows" not in data or "n" not in data:
        raise MatrixFormatError('matrix JSON must be an object with "n" and "rows"')
    n, rows = data["n"], data["rows"]
    if not _is_int(n) or n <= 0:
        raise MatrixFormatError(f'"n" must be a positive integer, got {n!r}')
    if not isinstance(rows, list) or len(rows) != n:
        raise MatrixFormatError(f'"rows" must be a list of {n} rows')
    if any(not isinstance(row, list) for row in rows):
        raise MatrixFormatError('each row must be a JSON array')
    return ToppleMatrix.from_rows(rows)
