# tests/core/test_sandpile.py
# Unit tests for toppling, stabilization, avalanche operators and recurrence.

import random
import unittest

import pytest

from core.errors import BudgetExceeded, InvalidConfiguration, NotCriticalError, ToppleCapExceeded
from core.matrix_generator import generate_matrix_batch
from core.sandpile import (
    ToppleRecord,
    avalanche_op,
    enumerate_recurrent,
    enumerate_stable_box,
    is_recurrent,
    is_recurrent_by_avalanche,
    is_stable,
    replay,
    stabilize,
    stable_box_size,
    topple,
)
from core.topple_matrix import RateVector, ToppleMatrix, canonical_rate
from core.vertex_policy import HighestIndexPolicy, RandomPolicy

EXAMPLE_RECURRENT = [(0, 2), (0, 3), (1, 1), (1, 2), (1, 3)]


class TestStabilize(unittest.TestCase):
    def setUp(self):
        self.matrix = ToppleMatrix.from_rows([[2, -1], [-3, 4]])

    def test_worked_stabilization(self):
        result, record = stabilize(self.matrix, (2, 5))
        self.assertEqual(result, (1, 3))
        self.assertEqual(record.sequence, (1, 2, 1))
        self.assertEqual(record.representation, (2, 1))

    def test_bursts_give_same_result(self):
        burst, burst_record = stabilize(self.matrix, (5, 5))
        single, single_record = stabilize(self.matrix, (5, 5), burst=False)
        self.assertEqual(burst, (1, 2))
        self.assertEqual(single, burst)
        self.assertEqual(single_record.representation, burst_record.representation)

    def test_order_does_not_matter(self):
        reference = stabilize(self.matrix, (9, 7))
        for seed in range(10):
            result, record = stabilize(self.matrix, (9, 7), RandomPolicy(seed=seed), burst=False)
            self.assertEqual(result, reference[0])
            self.assertEqual(record.representation, reference[1].representation)
        highest = stabilize(self.matrix, (9, 7), HighestIndexPolicy())
        self.assertEqual(highest[0], reference[0])

    def test_record_replays(self):
        _, record = stabilize(self.matrix, (2, 5))
        self.assertEqual(replay(self.matrix, (2, 5), record), (1, 3))

    def test_stable_input_is_untouched(self):
        result, record = stabilize(self.matrix, (1, 3))
        self.assertEqual(result, (1, 3))
        self.assertEqual(record, ToppleRecord(sequence=(), representation=(0, 0)))


def test_topple_single_vertex(example_matrix):
    assert topple(example_matrix, (2, 0), 1) == (0, 1)
    with pytest.raises(NotCriticalError):
        topple(example_matrix, (1, 0), 1)


def test_record_from_sequence():
    record = ToppleRecord.from_sequence([1, 2, 1], 2)
    assert record.representation == (2, 1)
    assert record.to_json() == {"sequence": [1, 2, 1], "representation": [2, 1]}


def test_configuration_checks(example_matrix):
    with pytest.raises(InvalidConfiguration):
        stabilize(example_matrix, (1, -1))
    with pytest.raises(InvalidConfiguration):
        is_stable(example_matrix, (1, 1, 1))


def test_topple_cap_on_non_toppling_matrix():
    matrix = ToppleMatrix.from_rows([[1, -2], [-2, 1]])
    with pytest.raises(ToppleCapExceeded):
        stabilize(matrix, (1, 0), cap=50)


def test_topple_cap_on_large_input(example_matrix):
    assert example_matrix.is_toppling
    with pytest.raises(ToppleCapExceeded):
        stabilize(example_matrix, (1000, 0), cap=10)
    with pytest.raises(ToppleCapExceeded):
        stabilize(example_matrix, (1000, 0), burst=False, cap=10)


def test_avalanche_operators(example_matrix):
    assert avalanche_op(example_matrix, (1, 3), 1) == (1, 1)
    assert avalanche_op(example_matrix, (0, 0), 1) == (1, 0)
    assert avalanche_op(example_matrix, (0, 0), 2) == (0, 1)
    with pytest.raises(InvalidConfiguration):
        avalanche_op(example_matrix, (2, 0), 1)


def test_avalanche_operators_commute(example_matrix):
    for u in enumerate_stable_box(example_matrix):
        assert avalanche_op(example_matrix, avalanche_op(example_matrix, u, 1), 2) == \
            avalanche_op(example_matrix, avalanche_op(example_matrix, u, 2), 1)


def test_is_recurrent(example_matrix, example_rate):
    assert is_recurrent(example_matrix, example_rate, (1, 2))
    assert not is_recurrent(example_matrix, example_rate, (0, 0))
    assert not is_recurrent(example_matrix, example_rate, (2, 0))


def test_golden_recurrent_set(example_matrix, example_rate):
    assert enumerate_recurrent(example_matrix, example_rate) == EXAMPLE_RECURRENT
    assert enumerate_recurrent(example_matrix) == EXAMPLE_RECURRENT


def test_avalanche_form_agrees(example_matrix):
    recurrent = set(EXAMPLE_RECURRENT)
    for u in enumerate_stable_box(example_matrix):
        assert is_recurrent_by_avalanche(example_matrix, u) == (u in recurrent)


def test_stable_box_budget(example_matrix):
    assert stable_box_size(example_matrix) == 8
    assert len(list(enumerate_stable_box(example_matrix))) == 8
    with pytest.raises(BudgetExceeded):
        enumerate_stable_box(example_matrix, budget=7)


def test_recurrent_count_is_det_on_random_matrices():
    for matrix in generate_matrix_batch(seed=2, count=15, max_n=3, max_diagonal=4):
        assert len(enumerate_recurrent(matrix)) == matrix.det


def test_recurrent_set_ignores_rate():
    matrix = ToppleMatrix.from_rows([[3, -1, -1], [-1, 3, -1], [-1, -1, 3]])
    base = enumerate_recurrent(matrix)
    assert enumerate_recurrent(matrix, RateVector.of(matrix, (1, 1, 1))) == base
    assert enumerate_recurrent(matrix, canonical_rate(matrix).scaled(matrix, 3)) == base
    assert len(base) == matrix.det


def test_confluence_on_random_matrices():
    rng = random.Random(1)
    for matrix in generate_matrix_batch(seed=9, count=10):
        u = tuple(rng.randint(0, 12) for _ in range(matrix.n))
        reference = stabilize(matrix, u)
        other = stabilize(matrix, u, RandomPolicy(rng=rng), burst=False)
        assert other[0] == reference[0]
        assert other[1].representation == reference[1].representation


if __name__ == "__main__":
    unittest.main()
