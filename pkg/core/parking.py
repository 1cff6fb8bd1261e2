# core/parking.py
# Parking functions over a toppling matrix: brute-force and greedy membership,
# enumeration, the d − u correspondence, and the two "allowed" tests.

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from core.errors import BudgetExceeded, InvalidConfiguration
from core.sandpile import DEFAULT_BOX_BUDGET, check_configuration, enumerate_stable_box
from core.topple_matrix import RateVector, ToppleMatrix, canonical_rate, d_cap, nonempty_subsets
from core.vertex_policy import LowestIndexPolicy, VertexPolicy

logger = logging.getLogger(__name__)

DEFAULT_OMEGA_BUDGET = 10 ** 7
DEFAULT_SUBSET_MAX_N = 20

CharVector = Tuple[int, ...]


@dataclass(frozen=True)
class GreedyResult:
    """
    Outcome of the greedy parking test.

    On success `sequence` is the full removal order π(1), …, π(m). On
    failure it is the prefix that was removed before the run stalled and
    `stall_step` is the 1-based step whose eligible set was empty.
    """
    is_parking: bool
    sequence: Tuple[int, ...]
    stall_step: Optional[int] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "is_parking": self.is_parking,
            "sequence": list(self.sequence),
            "stall_step": self.stall_step,
        }


def omega_size(r: Sequence[int]) -> int:
    """|Ω(r)| = ∏(rᵢ + 1) − 1."""
    return math.prod(x + 1 for x in r) - 1


def omega(r: Sequence[int]) -> Iterator[CharVector]:
    """Nonzero χ with 0 ≤ χ(i) ≤ rᵢ, in mixed-radix lexicographic order."""
    vectors = itertools.product(*(range(x + 1) for x in r))
    next(vectors)  # the zero vector comes first
    return vectors


def _check_omega_budget(rate: RateVector, budget: int) -> None:
    # The scan visits every vector of the box, zero included
    size = omega_size(rate.r) + 1
    if size > budget:
        logger.warning(f"Refusing Ω(r) scan over {size} vectors (budget {budget})")
        raise BudgetExceeded("omega", size, budget, detail=f"r = {rate.r}")


def column_pairing(matrix: ToppleMatrix, chi: Sequence[int], j: int) -> int:
    """⟨χ, Δ^j⟩ = Σᵢ χ(i)·Δ_ij."""
    return sum(chi[i] * matrix.entries[i][j - 1] for i in range(matrix.n))


def check_candidate(matrix: ToppleMatrix, f: Sequence[int]) -> Tuple[int, ...]:
    f = tuple(f)
    if len(f) != matrix.n:
        raise InvalidConfiguration(f"candidate has length {len(f)}, matrix has n={matrix.n}")
    if any(x < 0 for x in f):
        raise InvalidConfiguration(f"{f} has a negative value and cannot be a parking function")
    return f


def find_parking_violation(
    matrix: ToppleMatrix,
    rate: RateVector,
    f: Sequence[int],
    budget: int = DEFAULT_OMEGA_BUDGET,
) -> Optional[CharVector]:
    """The first χ ∈ Ω(r) for which no j with χ(j) ≥ 1 has f(j) < ⟨χ, Δ^j⟩, if any."""
    f = check_candidate(matrix, f)
    _check_omega_budget(rate, budget)
    n = matrix.n
    for chi in omega(rate.r):
        if not any(chi[j - 1] >= 1 and f[j - 1] < column_pairing(matrix, chi, j) for j in range(1, n + 1)):
            return chi
    return None


def is_parking_bruteforce(
    matrix: ToppleMatrix,
    rate: RateVector,
    f: Sequence[int],
    budget: int = DEFAULT_OMEGA_BUDGET,
) -> bool:
    """Membership straight from the definition, by scanning all of Ω(r)."""
    return find_parking_violation(matrix, rate, f, budget) is None


def _greedy_run(
    matrix: ToppleMatrix,
    rate: RateVector,
    f: Sequence[int],
    policy: VertexPolicy,
) -> GreedyResult:
    """
    Remove vertices from the multiset V(r) one at a time, each time picking a
    j still present with f(j) < ⟨χ, Δ^j⟩ for the χ of what remains.

    The chosen vertex keeps being removed while it stays eligible, which is a
    run of identical greedy choices. Values of f may be negative here.
    """
    n = matrix.n
    entries = matrix.entries
    chi = list(rate.r)
    pairing = [column_pairing(matrix, chi, j) for j in range(1, n + 1)]
    sequence: List[int] = []
    remaining = rate.m

    while remaining:
        # j can leave χ when it is still in χ and f_j sits below its pairing
        eligible = [j for j in range(1, n + 1) if chi[j - 1] >= 1 and f[j - 1] < pairing[j - 1]]
        if not eligible:
            logger.debug(f"Greedy run for f={tuple(f)} stalled at step {len(sequence) + 1}")
            return GreedyResult(is_parking=False, sequence=tuple(sequence), stall_step=len(sequence) + 1)

        vertex = policy.choose(eligible)
        threshold = entries[vertex - 1][vertex - 1]
        gap = pairing[vertex - 1] - f[vertex - 1]
        # Each removal lowers this pairing by Δ_jj; stop once f_j catches up
        times = min(chi[vertex - 1], -(-gap // threshold)) if threshold > 0 else 1

        # Removing j takes row j of Δ off every pairing
        chi[vertex - 1] -= times
        row = entries[vertex - 1]
        for k in range(n):
            pairing[k] -= times * row[k]
        sequence.extend([vertex] * times)
        remaining -= times

    return GreedyResult(is_parking=True, sequence=tuple(sequence))


def is_parking_greedy(
    matrix: ToppleMatrix,
    rate: RateVector,
    f: Sequence[int],
    policy: Optional[VertexPolicy] = None,
) -> GreedyResult:
    """Membership by the greedy removal sequence; any tie-break gives the same verdict."""
    f = check_candidate(matrix, f)
    return _greedy_run(matrix, rate, f, policy or LowestIndexPolicy())


def parking_set(
    matrix: ToppleMatrix,
    rate: RateVector,
    budget: int = DEFAULT_BOX_BUDGET,
    policy: Optional[VertexPolicy] = None,
) -> List[Tuple[int, ...]]:
    """P(Δ, r) for one rate vector, lexicographically sorted."""
    policy = policy or LowestIndexPolicy()
    return [
        f for f in enumerate_stable_box(matrix, budget)
        if _greedy_run(matrix, rate, f, policy).is_parking
    ]


def enumerate_parking(matrix: ToppleMatrix, budget: int = DEFAULT_BOX_BUDGET) -> List[Tuple[int, ...]]:
    """
    P(Δ) under the canonical rate vector. Outside the box ∏[0, Δ_jj − 1]
    the unit vector χ = e_j already fails, so the box is the whole search.
    """
    matrix.require_toppling()
    functions = parking_set(matrix, canonical_rate(matrix), budget)
    if len(functions) != matrix.det:
        logger.error(f"Parking count {len(functions)} differs from det {matrix.det} for {matrix.entries}")
    return functions


def _check_in_box(matrix: ToppleMatrix, v: Sequence[int], label: str) -> Tuple[int, ...]:
    v = tuple(v)
    d = d_cap(matrix)
    if len(v) != matrix.n or any(not 0 <= x <= cap for x, cap in zip(v, d)):
        raise InvalidConfiguration(f"{label} {v} lies outside the stable box")
    return v


def parking_to_recurrent(matrix: ToppleMatrix, f: Sequence[int]) -> Tuple[int, ...]:
    """u = d − f."""
    f = _check_in_box(matrix, f, "parking candidate")
    return tuple(a - b for a, b in zip(d_cap(matrix), f))


def recurrent_to_parking(matrix: ToppleMatrix, u: Sequence[int]) -> Tuple[int, ...]:
    """f = d − u."""
    u = _check_in_box(matrix, u, "configuration")
    return tuple(a - b for a, b in zip(d_cap(matrix), u))


def is_r_allowed(matrix: ToppleMatrix, rate: RateVector, u: Sequence[int]) -> bool:
    """
    For every χ ∈ Ω(r) some j with χ(j) ≥ 1 has u_j ≥ Δ_jj − ⟨χ, Δ^j⟩.

    This is exactly the parking inequality for d − u, so the greedy run
    decides it; d − u may go negative when u is unstable.
    """
    u = check_configuration(matrix, u)
    shifted = tuple(a - b for a, b in zip(d_cap(matrix), u))
    return _greedy_run(matrix, rate, shifted, LowestIndexPolicy()).is_parking


def is_r_allowed_bruteforce(
    matrix: ToppleMatrix,
    rate: RateVector,
    u: Sequence[int],
    budget: int = DEFAULT_OMEGA_BUDGET,
) -> bool:
    """The r-allowed test by scanning every χ ∈ Ω(r)."""
    u = check_configuration(matrix, u)
    _check_omega_budget(rate, budget)
    n = matrix.n
    for chi in omega(rate.r):
        if not any(
            chi[j - 1] >= 1 and u[j - 1] >= matrix.entry(j, j) - column_pairing(matrix, chi, j)
            for j in range(1, n + 1)
        ):
            return False
    return True


def is_dhar_allowed(matrix: ToppleMatrix, u: Sequence[int], max_n: int = DEFAULT_SUBSET_MAX_N) -> bool:
    """
    Subset form of "allowed": every nonempty I has some j ∈ I with
    u_j ≥ Σ_{i ∈ I, i ≠ j} (−Δ_ij). Not equivalent to recurrence in general.
    """
    u = check_configuration(matrix, u)
    n = matrix.n
    if n > max_n:
        raise BudgetExceeded("subset scan", 2 ** n - 1, 2 ** max_n - 1, detail=f"n = {n} > {max_n}")
    for subset in nonempty_subsets(n):
        if not any(
            u[j - 1] >= sum(-matrix.entry(i, j) for i in subset if i != j)
            for j in subset
        ):
            return False
    return True
