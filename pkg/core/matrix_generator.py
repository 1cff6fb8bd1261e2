# core/matrix_generator.py
# Generates random toppling matrices for the property battery.

import logging
import random
from typing import List, Optional

from core.topple_matrix import ToppleMatrix

logger = logging.getLogger(__name__)


def _random_row(rng: random.Random, n: int, i: int, max_diagonal: int) -> List[int]:
    """One row with Δ_ii in [1, max_diagonal] and off-diagonal mass at most Δ_ii."""
    diagonal = rng.randint(1, max_diagonal)
    row = [0] * n
    row[i] = diagonal
    budget = rng.randint(0, diagonal) if n > 1 else 0
    others = [j for j in range(n) if j != i]
    for _ in range(budget):
        row[rng.choice(others)] -= 1
    return row


def generate_toppling_matrix(
    rng: random.Random,
    n: Optional[int] = None,
    max_n: int = 4,
    max_diagonal: int = 5,
) -> ToppleMatrix:
    """
    Draws integer matrices with nonpositive off-diagonal entries and
    nonnegative row sums until one has nonzero determinant. Such a matrix is
    always toppling; it is validated anyway before being returned.
    """
    if n is None:
        n = rng.randint(1, max_n)
    attempts = 0
    while True:  # Loop until the determinant is nonzero.
        attempts += 1
        matrix = ToppleMatrix.from_rows(
            _random_row(rng, n, i, max_diagonal) for i in range(n)
        )
        if matrix.det != 0:
            break

    matrix.require_toppling()
    logger.debug(f"Generated toppling matrix {matrix.entries} (det={matrix.det}) after {attempts} draws")
    return matrix


def generate_matrix_batch(
    seed: int,
    count: int,
    max_n: int = 4,
    max_diagonal: int = 5,
) -> List[ToppleMatrix]:
    """A reproducible batch of toppling matrices."""
    rng = random.Random(seed)
    return [generate_toppling_matrix(rng, max_n=max_n, max_diagonal=max_diagonal) for _ in range(count)]
