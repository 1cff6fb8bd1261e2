# core/sandpile.py
# Configurations, toppling, stabilization, avalanche operators and recurrence.

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from core.errors import BudgetExceeded, InvalidConfiguration, NotCriticalError, ToppleCapExceeded
from core.topple_matrix import RateVector, ToppleMatrix, canonical_rate
from core.vertex_policy import LowestIndexPolicy, VertexPolicy

logger = logging.getLogger(__name__)

Configuration = Tuple[int, ...]

DEFAULT_TOPPLE_CAP = 10 ** 6
DEFAULT_BOX_BUDGET = 10 ** 6


@dataclass(frozen=True)
class ToppleRecord:
    """An ordered toppling sequence and its representation vector."""
    sequence: Tuple[int, ...]
    representation: Tuple[int, ...]

    @classmethod
    def from_sequence(cls, sequence: Sequence[int], n: int) -> "ToppleRecord":
        counts = [0] * n
        for vertex in sequence:
            counts[vertex - 1] += 1
        return cls(sequence=tuple(sequence), representation=tuple(counts))

    def to_json(self) -> Dict[str, Any]:
        return {"sequence": list(self.sequence), "representation": list(self.representation)}


def check_configuration(matrix: ToppleMatrix, u: Sequence[int]) -> Configuration:
    """Return u as a tuple, or raise if it is not a configuration for `matrix`."""
    u = tuple(u)
    if len(u) != matrix.n:
        raise InvalidConfiguration(f"configuration has length {len(u)}, matrix has n={matrix.n}")
    if any(x < 0 for x in u):
        raise InvalidConfiguration(f"{u} has a negative entry and is not a configuration")
    return u


def critical_vertices(matrix: ToppleMatrix, u: Sequence[int]) -> List[int]:
    diagonal = matrix.diagonal
    return [i + 1 for i in range(matrix.n) if u[i] >= diagonal[i]]


def is_stable(matrix: ToppleMatrix, u: Sequence[int]) -> bool:
    """True iff uᵢ < Δ_ii for every vertex."""
    u = check_configuration(matrix, u)
    return not critical_vertices(matrix, u)


def topple(matrix: ToppleMatrix, u: Sequence[int], i: int) -> Configuration:
    """Subtract row Δ_i from u; vertex i must be critical."""
    u = check_configuration(matrix, u)
    threshold = matrix.entry(i, i)
    if u[i - 1] < threshold:
        raise NotCriticalError(i, u[i - 1], threshold)
    return tuple(a - b for a, b in zip(u, matrix.row(i)))


def stabilize(
    matrix: ToppleMatrix,
    u: Sequence[int],
    policy: Optional[VertexPolicy] = None,
    burst: bool = True,
    cap: int = DEFAULT_TOPPLE_CAP,
) -> Tuple[Configuration, ToppleRecord]:
    """
    Topple critical vertices until none is left.

    The policy picks which critical vertex goes next. With burst=True the
    chosen vertex is toppled ⌊uᵢ/Δ_ii⌋ times in a row, each of which is a
    legal single toppling, so the record still replays step by step.

    Raises:
        ToppleCapExceeded: after `cap` single topplings. A matrix that is
            not toppling never stabilizes; a toppling matrix can still trip
            the cap when u is very large.
    """
    u = list(check_configuration(matrix, u))
    policy = policy or LowestIndexPolicy()
    n = matrix.n
    diagonal = matrix.diagonal
    sequence: List[int] = []
    counts = [0] * n
    total = 0

    while True:
        critical = [i + 1 for i in range(n) if u[i] >= diagonal[i]]
        if not critical:
            break
        vertex = policy.choose(critical)
        threshold = diagonal[vertex - 1]
        # Burst mode fires the vertex as often as it stays critical
        times = u[vertex - 1] // threshold if burst and threshold > 0 else 1
        total += times
        if total > cap:
            logger.warning(f"Stabilization of {tuple(u)} passed the cap of {cap} topplings")
            raise ToppleCapExceeded(cap)
        # Toppling i subtracts row i of Δ
        row = matrix.entries[vertex - 1]
        for k in range(n):
            u[k] -= times * row[k]
        sequence.extend([vertex] * times)
        counts[vertex - 1] += times

    logger.debug(f"Stabilized after {total} topplings, representation {counts}")
    return tuple(u), ToppleRecord(sequence=tuple(sequence), representation=tuple(counts))


def replay(matrix: ToppleMatrix, u: Sequence[int], record: ToppleRecord) -> Configuration:
    """Replay a record one toppling at a time; every step must be legal."""
    current = check_configuration(matrix, u)
    for vertex in record.sequence:
        current = topple(matrix, current, vertex)
    return current


def avalanche_op(
    matrix: ToppleMatrix,
    u: Sequence[int],
    i: int,
    policy: Optional[VertexPolicy] = None,
    cap: int = DEFAULT_TOPPLE_CAP,
) -> Configuration:
    """A_i: add one chip at vertex i to a stable u, then stabilize."""
    if not is_stable(matrix, u):
        raise InvalidConfiguration(f"avalanche operators act on stable configurations, got {tuple(u)}")
    if not 1 <= i <= matrix.n:
        raise ValueError(f"vertex {i} outside 1..{matrix.n}")
    bumped = list(u)
    bumped[i - 1] += 1
    result, _ = stabilize(matrix, bumped, policy=policy, cap=cap)
    return result


def is_recurrent(
    matrix: ToppleMatrix,
    rate: RateVector,
    u: Sequence[int],
    cap: int = DEFAULT_TOPPLE_CAP,
) -> bool:
    """u is stable and u + rΔ stabilizes back to u."""
    u = check_configuration(matrix, u)
    if critical_vertices(matrix, u):
        return False
    loaded = tuple(a + b for a, b in zip(u, rate.c))
    result, _ = stabilize(matrix, loaded, cap=cap)
    return result == u


def stable_box_size(matrix: ToppleMatrix) -> int:
    return math.prod(max(x, 0) for x in matrix.diagonal)


def enumerate_stable_box(matrix: ToppleMatrix, budget: int = DEFAULT_BOX_BUDGET) -> Iterator[Configuration]:
    """All stable configurations ∏ [0, Δ_jj − 1], lexicographic."""
    size = stable_box_size(matrix)
    if size > budget:
        logger.warning(f"Refusing stable box of size {size} (budget {budget})")
        raise BudgetExceeded("stable box", size, budget, detail=f"product of diagonal {matrix.diagonal}")
    return itertools.product(*(range(x) for x in matrix.diagonal))


def enumerate_recurrent(
    matrix: ToppleMatrix,
    rate: Optional[RateVector] = None,
    budget: int = DEFAULT_BOX_BUDGET,
    cap: int = DEFAULT_TOPPLE_CAP,
) -> List[Configuration]:
    """The recurrent configurations, in lexicographic order."""
    rate = rate or canonical_rate(matrix)
    return [u for u in enumerate_stable_box(matrix, budget) if is_recurrent(matrix, rate, u, cap)]


def is_recurrent_by_avalanche(
    matrix: ToppleMatrix,
    u: Sequence[int],
    budget: int = DEFAULT_BOX_BUDGET,
) -> bool:
    """
    Recurrence in the avalanche-operator form: for every vertex i some
    power A_i^c (c ≥ 1) returns u to itself. An orbit inside the stable box
    that has not come back within box-size steps never will.
    """
    u = check_configuration(matrix, u)
    if critical_vertices(matrix, u):
        return False
    limit = stable_box_size(matrix)
    if limit > budget:
        raise BudgetExceeded("stable box", limit, budget)
    for i in range(1, matrix.n + 1):
        current = u
        for _ in range(limit):
            current = avalanche_op(matrix, current, i)
            if current == u:
                break
        else:
            return False
    return True
