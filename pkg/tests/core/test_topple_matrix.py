# tests/core/test_topple_matrix.py
# Unit tests for toppling-matrix arithmetic, validation and rate vectors.

import random
import unittest

import pytest

from core.errors import InvalidRateVector, MatrixFormatError, NotTopplingError
from core.matrix_generator import generate_matrix_batch
from core.topple_matrix import (
    RateVector,
    ToppleMatrix,
    all_principal_submatrices_toppling,
    alternative_rates,
    canonical_rate,
    d_cap,
    enumerate_rate_vectors,
    is_rate_vector,
    matrix_from_json,
    nonempty_subsets,
    primitive_rate,
    principal_minor,
    row_times,
    satisfies_conditions,
    submatrix,
    times_column,
    toppling_matrix,
    transpose,
    validate_toppling,
)


class TestExampleMatrix(unittest.TestCase):
    def setUp(self):
        self.matrix = ToppleMatrix.from_rows([[2, -1], [-3, 4]])

    def test_determinant_and_adjugate(self):
        self.assertEqual(self.matrix.det, 5)
        self.assertEqual(self.matrix.adj, ((4, 1), (3, 2)))

    def test_report_carries_both_certificates(self):
        report = validate_toppling(self.matrix)
        self.assertTrue(report.is_toppling)
        self.assertEqual(report.violations, [])
        self.assertEqual(report.row_certificate.r, (7, 3))
        self.assertEqual(report.row_certificate.c, (5, 5))
        self.assertEqual(report.column_certificate, (5, 5))

    def test_one_based_accessors(self):
        self.assertEqual(self.matrix.entry(2, 1), -3)
        self.assertEqual(self.matrix.row(1), (2, -1))
        self.assertEqual(self.matrix.column(2), (-1, 4))
        self.assertEqual(self.matrix.diagonal, (2, 4))
        self.assertEqual(d_cap(self.matrix), (1, 3))

    def test_rate_vector_fields(self):
        rate = RateVector.of(self.matrix, (2, 1))
        self.assertEqual(rate.c, (1, 2))
        self.assertEqual(rate.m, 3)

    def test_transpose_is_toppling(self):
        flipped = transpose(self.matrix)
        self.assertEqual(flipped.entries, ((2, -3), (-1, 4)))
        self.assertTrue(flipped.is_toppling)
        self.assertEqual(flipped.det, self.matrix.det)


def test_single_vertex_matrix():
    matrix = toppling_matrix([[3]])
    assert matrix.det == 3
    assert matrix.adj == ((1,),)
    assert canonical_rate(matrix).r == (1,)


def test_positive_off_diagonal_is_reported():
    report = validate_toppling(ToppleMatrix.from_rows([[1, 1], [0, 1]]))
    assert not report.is_toppling
    assert "Δ[1,2]" in report.violations[0]
    assert report.row_certificate is None


def test_negative_determinant_is_reported():
    report = validate_toppling(ToppleMatrix.from_rows([[1, -2], [-2, 1]]))
    assert not report.is_toppling
    assert report.det == -3
    assert report.violations == ["determinant -3 is not positive"]


def test_adjugate_sign_failure_is_reported():
    # det = 1 > 0 but the diagonal is negative
    report = validate_toppling(ToppleMatrix.from_rows([[-1, -1], [-1, -2]]))
    assert not report.is_toppling
    assert any("adjugate diagonal" in v for v in report.violations)


def test_require_toppling_raises():
    with pytest.raises(NotTopplingError):
        toppling_matrix([[1, -2], [-2, 1]])


@pytest.mark.parametrize("rows", [
    [],
    [[1, 2, 3], [1, 2]],
    [[1.5, 0], [0, 1]],
    [[True, 0], [0, 1]],
])
def test_malformed_rows_are_rejected(rows):
    with pytest.raises(MatrixFormatError):
        ToppleMatrix.from_rows(rows)


def test_matrix_from_json(example_matrix):
    assert matrix_from_json({"n": 2, "rows": [[2, -1], [-3, 4]]}) == example_matrix
    with pytest.raises(MatrixFormatError):
        matrix_from_json({"rows": [[1]]})
    with pytest.raises(MatrixFormatError):
        matrix_from_json({"n": 3, "rows": [[2, -1], [-3, 4]]})
    with pytest.raises(MatrixFormatError):
        matrix_from_json([[1]])


def test_rate_vectors(example_matrix):
    assert is_rate_vector(example_matrix, (2, 1))
    assert not is_rate_vector(example_matrix, (1, 1))
    assert not is_rate_vector(example_matrix, (0, 1))
    with pytest.raises(InvalidRateVector):
        is_rate_vector(example_matrix, (1, 1, 1))
    with pytest.raises(InvalidRateVector):
        RateVector.of(example_matrix, (1, 1))


def test_row_times(example_matrix):
    assert row_times((1, 1), example_matrix) == (-1, 3)


def test_enumerate_rate_vectors(example_matrix):
    found = [rate.r for rate in enumerate_rate_vectors(example_matrix, 3)]
    assert found == [(2, 1), (3, 1), (3, 2)]


def test_primitive_and_alternative_rates(example_matrix, k3_matrix):
    assert primitive_rate(example_matrix).r == (7, 3)
    assert primitive_rate(k3_matrix).r == (1, 1)
    rates = [rate.r for rate in alternative_rates(example_matrix)]
    assert rates == [(7, 3), (14, 6), (11, 4)]


def test_satisfies_conditions(example_matrix):
    assert satisfies_conditions(example_matrix, (2, 1))
    assert not satisfies_conditions(example_matrix, (1, 1))
    assert not satisfies_conditions(ToppleMatrix.from_rows([[1, -1], [-1, 1]]), (1, 1))


def test_submatrices(example_matrix):
    assert list(nonempty_subsets(2)) == [(1,), (2,), (1, 2)]
    assert submatrix(example_matrix, [2]).entries == ((4,),)
    assert principal_minor(example_matrix, [1]) == 2
    assert principal_minor(example_matrix, [1, 2]) == 5
    assert all_principal_submatrices_toppling(example_matrix)
    with pytest.raises(ValueError):
        submatrix(example_matrix, [])
    with pytest.raises(ValueError):
        submatrix(example_matrix, [3])


def test_to_json_shapes(example_matrix):
    assert example_matrix.to_json() == {"n": 2, "rows": [[2, -1], [-3, 4]]}
    payload = example_matrix.report.to_json()
    assert payload["row_certificate"] == {"r": [7, 3], "c": [5, 5], "m": 10}
    assert payload["column_certificate"] == [5, 5]


def _sign_pattern_matrices(seed, count):
    """Random matrices with off-diagonals ≤ 0; some are toppling, some are not."""
    rng = random.Random(seed)
    found = []
    for _ in range(count):
        n = rng.randint(1, 3)
        rows = [[rng.randint(-1, 4) if i == j else rng.randint(-2, 0) for j in range(n)] for i in range(n)]
        found.append(ToppleMatrix.from_rows(rows))
    return found


class TestTopplingLaws(unittest.TestCase):
    def setUp(self):
        self.generated = generate_matrix_batch(seed=11, count=40)
        self.mixed = _sign_pattern_matrices(seed=5, count=150)

    def test_mixed_batch_has_both_kinds(self):
        kinds = {m.is_toppling for m in self.mixed}
        self.assertEqual(kinds, {True, False})

    def test_transpose_keeps_toppling_status(self):
        for m in self.generated + self.mixed:
            self.assertEqual(transpose(m).is_toppling, m.is_toppling, m.entries)

    def test_principal_minors_are_positive(self):
        for m in self.generated + [m for m in self.mixed if m.is_toppling]:
            for subset in nonempty_subsets(m.n):
                self.assertGreater(principal_minor(m, subset), 0, (m.entries, subset))

    def test_canonical_rate_gives_det_times_ones(self):
        for m in self.generated + [m for m in self.mixed if m.is_toppling]:
            self.assertEqual(row_times(canonical_rate(m).r, m), (m.det,) * m.n)

    def test_column_certificate_gives_det_times_ones(self):
        for m in self.generated + [m for m in self.mixed if m.is_toppling]:
            h = m.report.column_certificate
            self.assertTrue(all(x > 0 for x in h))
            self.assertEqual(times_column(m.entries, h), (m.det,) * m.n)

    def test_failed_report_has_no_certificates(self):
        for m in self.mixed:
            if not m.is_toppling:
                self.assertIsNone(m.report.row_certificate)
                self.assertIsNone(m.report.column_certificate)
                self.assertTrue(m.report.violations)


def test_times_column(example_matrix):
    assert times_column(example_matrix.entries, (1, 1)) == (1, 1)
    assert times_column(example_matrix.entries, (5, 5)) == (5, 5)


if __name__ == "__main__":
    unittest.main()
