# tests/core/test_matrix_generator.py
# Unit tests for random toppling-matrix generation.

import random
import unittest

from core.matrix_generator import generate_matrix_batch, generate_toppling_matrix
from core.topple_matrix import all_principal_submatrices_toppling


class TestMatrixGenerator(unittest.TestCase):
    def test_batch_matrices_are_toppling(self):
        """
        Every generated matrix is toppling, within the size limits, with
        nonpositive off-diagonal entries and nonnegative row sums.
        """
        for matrix in generate_matrix_batch(seed=3, count=30, max_n=4, max_diagonal=5):
            self.assertTrue(matrix.is_toppling)
            self.assertLessEqual(matrix.n, 4)
            self.assertTrue(all(1 <= x <= 5 for x in matrix.diagonal))
            for i, row in enumerate(matrix.entries):
                self.assertTrue(all(v <= 0 for j, v in enumerate(row) if j != i))
                self.assertGreaterEqual(sum(row), 0)

    def test_batch_is_reproducible(self):
        first = generate_matrix_batch(seed=11, count=10)
        second = generate_matrix_batch(seed=11, count=10)
        self.assertEqual([m.entries for m in first], [m.entries for m in second])

    def test_fixed_size(self):
        matrix = generate_toppling_matrix(random.Random(0), n=3)
        self.assertEqual(matrix.n, 3)

    def test_principal_submatrices_are_toppling(self):
        for matrix in generate_matrix_batch(seed=5, count=10, max_n=3):
            self.assertTrue(all_principal_submatrices_toppling(matrix))


if __name__ == "__main__":
    unittest.main()
