# tests/core/test_lattice.py
# Unit tests for lattice classes, recurrent representatives and the class audit.

import random
import unittest

import pytest

from core.errors import FixedPointCapExceeded, InvalidConfiguration, NotTopplingError
from core.lattice import (
    class_audit,
    class_key,
    count_classes,
    group_order,
    recurrent_representative,
    same_class,
)
from core.matrix_generator import generate_matrix_batch
from core.sandpile import enumerate_recurrent, enumerate_stable_box, is_recurrent
from core.topple_matrix import RateVector, ToppleMatrix, canonical_rate


class TestSameClass(unittest.TestCase):
    def setUp(self):
        self.matrix = ToppleMatrix.from_rows([[2, -1], [-3, 4]])

    def test_row_difference_is_equivalent(self):
        result = same_class(self.matrix, (2, -1), (0, 0))
        self.assertTrue(result.same)
        self.assertEqual(result.witness, (1, 0))

    def test_non_lattice_difference(self):
        result = same_class(self.matrix, (0, 1), (0, 0))
        self.assertFalse(result.same)
        self.assertIsNone(result.witness)

    def test_length_mismatch(self):
        with pytest.raises(InvalidConfiguration):
            same_class(self.matrix, (0, 1, 2), (0, 0))

    def test_class_keys(self):
        self.assertEqual(class_key(self.matrix, (2, -1)), class_key(self.matrix, (0, 0)))
        self.assertEqual(count_classes(self.matrix, enumerate_stable_box(self.matrix)), 5)
        self.assertEqual(group_order(self.matrix), 5)


def test_representative_of_loaded_configuration(example_matrix, example_rate):
    assert recurrent_representative(example_matrix, example_rate, (5, 5)) == (1, 2)


def test_representative_of_negative_vector(example_matrix, example_rate):
    u = recurrent_representative(example_matrix, example_rate, (-1, -1))
    assert u == (1, 3)
    result = same_class(example_matrix, (-1, -1), u)
    assert result.same
    assert result.witness == (-4, -2)


def test_representative_iteration_cap(example_matrix, example_rate):
    with pytest.raises(FixedPointCapExceeded):
        recurrent_representative(example_matrix, example_rate, (0, 0), max_iterations=0)


def test_representatives_on_random_vectors():
    rng = random.Random(6)
    batch = generate_matrix_batch(seed=6, count=10, max_n=3, max_diagonal=4)
    for _ in range(40):
        matrix = rng.choice(batch)
        rate = canonical_rate(matrix)
        v = tuple(rng.randint(-10, 10) for _ in range(matrix.n))
        u = recurrent_representative(matrix, rate, v)
        assert is_recurrent(matrix, rate, u)
        assert same_class(matrix, u, v).same


def test_recurrent_configurations_fill_classes(example_matrix):
    recurrent = enumerate_recurrent(example_matrix)
    assert count_classes(example_matrix, recurrent) == len(recurrent) == 5


def test_class_audit(example_matrix, example_rate):
    report = class_audit(example_matrix, example_rate)
    assert report.passed
    assert report.to_json() == {"det": 5, "parking_count": 5, "recurrent_count": 5, "violations": []}


def test_class_audit_on_random_matrices():
    for matrix in generate_matrix_batch(seed=12, count=10):
        assert class_audit(matrix).passed


def test_non_toppling_matrix_is_refused():
    matrix = ToppleMatrix.from_rows([[1, -2], [-2, 1]])
    with pytest.raises(NotTopplingError):
        same_class(matrix, (0, 0), (1, 1))


if __name__ == "__main__":
    unittest.main()
