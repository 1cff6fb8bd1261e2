# engine/selftest.py
# Golden fixtures and randomized property checks, one CriterionResult per criterion.

import logging
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from core.check_events import CheckEvent, EventType
from core.check_events_manager import CheckEventManager
from core.digraph import build_digraph, count_arborescences, scaled_determinant_identity
from core.errors import BudgetExceeded, SandpileError
from core.lattice import class_audit, recurrent_representative, same_class
from core.matrix_generator import generate_matrix_batch, generate_toppling_matrix
from core.parking import (
    is_parking_bruteforce,
    is_parking_greedy,
    is_r_allowed,
    omega_size,
    parking_set,
    parking_to_recurrent,
)
from core.sandpile import (
    avalanche_op,
    enumerate_recurrent,
    enumerate_stable_box,
    is_recurrent,
    stabilize,
)
from core.topple_matrix import (
    RateVector,
    ToppleMatrix,
    alternative_rates,
    canonical_rate,
    enumerate_rate_vectors,
    nonempty_subsets,
    primitive_rate,
)
from core.vertex_policy import HighestIndexPolicy, LowestIndexPolicy, RandomPolicy
from engine.run_config import Budgets, SelftestSettings

logger = logging.getLogger(__name__)

EXAMPLE_ROWS = ((2, -1), (-3, 4))
EXAMPLE_RATE = (2, 1)
EXAMPLE_PARKING = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)]
EXAMPLE_RECURRENT = [(0, 2), (0, 3), (1, 1), (1, 2), (1, 3)]
EXAMPLE_ARBORESCENCES = 10

# Upper bound on law-check rate vectors per matrix; pairs grow quadratically.
LAW_RATE_SAMPLE = 6

Sets = Tuple[List[Tuple[int, ...]], List[Tuple[int, ...]]]


@dataclass
class CriterionResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "witness": self.witness,
        }


class CheckFailed(Exception):
    """Raised inside a check to stop at the first counterexample."""

    def __init__(self, detail: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.witness = witness or {}


class SelfTestRunner:
    """
    Runs the full battery against a seeded random batch of toppling matrices.

    The batch and its parking/recurrent sets are computed once and shared by
    every criterion that refers to them. Events go to the event manager so a
    caller can log or collect progress.
    """

    def __init__(
        self,
        settings: Optional[SelftestSettings] = None,
        budgets: Optional[Budgets] = None,
        seed: int = 0,
        event_manager: Optional[CheckEventManager] = None,
    ):
        self.settings = settings or SelftestSettings()
        self.budgets = budgets or Budgets()
        self.seed = seed
        self.event_manager = event_manager or CheckEventManager()
        self._batch: Optional[List[ToppleMatrix]] = None
        self._sets: Dict[int, Sets] = {}

    @property
    def checks(self) -> List[Tuple[int, str, Callable[[], str]]]:
        return [
            (1, "golden parking set", self.check_golden_parking),
            (2, "golden recurrent set", self.check_golden_recurrent),
            (3, "counting |P| = |R| = det", self.check_counting),
            (4, "d - u bijection", self.check_bijection),
            (5, "greedy agrees with brute force", self.check_oracle),
            (6, "rate independence", self.check_rate_independence),
            (7, "confluence of stabilization", self.check_confluence),
            (8, "avalanche operators commute", self.check_abelian),
            (9, "matrix-tree cross-check", self.check_arborescences),
            (10, "intersection and monotonicity laws", self.check_laws),
            (11, "class audit and representatives", self.check_classes),
            (12, "allowed iff recurrent", self.check_allowed),
        ]

    def _emit(self, event_type: EventType, data: Dict[str, Any], debug_data: Optional[Dict[str, Any]] = None) -> None:
        self.event_manager.emit(CheckEvent(type=event_type, data=data, debug_data=debug_data or {}))

    def run(self, only: Optional[List[int]] = None) -> List[CriterionResult]:
        results = []
        self._emit(EventType.SELFTEST_START, {"seed": self.seed})
        for criterion, name, check in self.checks:
            if only and criterion not in only:
                continue
            results.append(self.run_check(criterion, name, check))
        self._emit(EventType.SELFTEST_END, {
            "passed": sum(r.passed for r in results),
            "total": len(results),
        })
        return results

    def run_check(self, criterion: int, name: str, check: Callable[[], str]) -> CriterionResult:
        self._emit(EventType.CHECK_STARTED, {"criterion": criterion, "name": name})
        try:
            result = CriterionResult(criterion, name, True, check())
        except CheckFailed as e:
            result = CriterionResult(criterion, name, False, e.detail, e.witness)
        except BudgetExceeded as e:
            self._emit(EventType.BUDGET_REFUSED, {"criterion": criterion, "size": e.size, "budget": e.budget})
            result = CriterionResult(criterion, name, False, f"budget refused: {e}")
        except SandpileError as e:
            logger.error(f"Criterion {criterion} raised {type(e).__name__}: {e}")
            result = CriterionResult(criterion, name, False, f"{type(e).__name__}: {e}")

        event_type = EventType.CHECK_PASSED if result.passed else EventType.CHECK_FAILED
        self._emit(event_type, {"criterion": criterion, "name": name, "detail": result.detail}, result.witness)
        return result

    # Shared data

    @property
    def batch(self) -> List[ToppleMatrix]:
        if self._batch is None:
            s = self.settings
            self._batch = generate_matrix_batch(self.seed, s.random_matrices, s.max_n, s.max_diagonal)
            logger.info(f"Generated {len(self._batch)} random toppling matrices")
        return self._batch

    def sets(self, index: int) -> Sets:
        """Parking and recurrent sets of batch matrix `index` under the canonical rate."""
        if index not in self._sets:
            matrix = self.batch[index]
            rate = canonical_rate(matrix)
            self._sets[index] = (
                parking_set(matrix, rate, self.budgets.box),
                enumerate_recurrent(matrix, rate, self.budgets.box, self.budgets.topples),
            )
        return self._sets[index]

    def _rng(self, salt: int) -> random.Random:
        return random.Random(self.seed * 1000 + salt)

    # Criteria

    def _example(self) -> Tuple[ToppleMatrix, RateVector]:
        matrix = ToppleMatrix.from_rows(EXAMPLE_ROWS)
        return matrix, RateVector.of(matrix, EXAMPLE_RATE)

    def check_golden_parking(self) -> str:
        matrix, rate = self._example()
        found = parking_set(matrix, rate, self.budgets.box)
        if found != EXAMPLE_PARKING:
            raise CheckFailed(f"got {found}", {"expected": EXAMPLE_PARKING, "found": found})
        return f"{len(found)} parking functions match"

    def check_golden_recurrent(self) -> str:
        matrix, rate = self._example()
        found = enumerate_recurrent(matrix, rate, self.budgets.box, self.budgets.topples)
        if found != EXAMPLE_RECURRENT:
            raise CheckFailed(f"got {found}", {"expected": EXAMPLE_RECURRENT, "found": found})
        return f"{len(found)} recurrent configurations match"

    def check_counting(self) -> str:
        for index, matrix in enumerate(self.batch):
            parking, recurrent = self.sets(index)
            if not len(parking) == len(recurrent) == matrix.det:
                raise CheckFailed(
                    f"|P| = {len(parking)}, |R| = {len(recurrent)}, det = {matrix.det}",
                    {"matrix": matrix.to_json()},
                )
        return f"{len(self.batch)} matrices"

    def check_bijection(self) -> str:
        for index, matrix in enumerate(self.batch):
            parking, recurrent = self.sets(index)
            images = sorted(parking_to_recurrent(matrix, f) for f in parking)
            if images != recurrent:
                raise CheckFailed("d - P differs from R", {"matrix": matrix.to_json()})
        return f"{len(self.batch)} matrices"

    def check_oracle(self) -> str:
        s = self.settings
        policies = [LowestIndexPolicy(), HighestIndexPolicy(), RandomPolicy(seed=self.seed)]
        checked = skipped = 0
        for matrix in self.batch:
            if matrix.n > s.oracle_max_n:
                continue
            rate = canonical_rate(matrix)
            if omega_size(rate.r) > s.oracle_omega_cap:
                skipped += 1
                self._emit(EventType.BUDGET_REFUSED, {
                    "criterion": 5,
                    "omega": omega_size(rate.r),
                    "cap": s.oracle_omega_cap,
                })
                continue
            for f in enumerate_stable_box(matrix, self.budgets.box):
                expected = is_parking_bruteforce(matrix, rate, f, self.budgets.omega)
                for policy in policies:
                    if is_parking_greedy(matrix, rate, f, policy).is_parking != expected:
                        raise CheckFailed(
                            f"f = {f}: brute force says {expected}",
                            {"matrix": matrix.to_json(), "f": list(f), "policy": type(policy).__name__},
                        )
            checked += 1
        return f"{checked} matrices, {skipped} over the Ω cap"

    def check_rate_independence(self) -> str:
        for index, matrix in enumerate(self.batch):
            parking, recurrent = self.sets(index)
            for rate in alternative_rates(matrix)[1:]:
                if parking_set(matrix, rate, self.budgets.box) != parking:
                    raise CheckFailed(f"parking set changes under r = {rate.r}", {"matrix": matrix.to_json()})
                if enumerate_recurrent(matrix, rate, self.budgets.box, self.budgets.topples) != recurrent:
                    raise CheckFailed(f"recurrent set changes under r = {rate.r}", {"matrix": matrix.to_json()})
        return f"{len(self.batch)} matrices, 3 rate vectors each"

    def check_confluence(self) -> str:
        s = self.settings
        rng = self._rng(7)
        for _ in range(s.confluence_pairs):
            matrix = rng.choice(self.batch)
            u = tuple(rng.randint(0, 3 * max(matrix.diagonal)) for _ in range(matrix.n))
            reference = stabilize(matrix, u, cap=self.budgets.topples)
            for _ in range(s.confluence_orders):
                policy = RandomPolicy(rng=random.Random(rng.random()))
                result, record = stabilize(matrix, u, policy, burst=False, cap=self.budgets.topples)
                if (result, record.representation) != (reference[0], reference[1].representation):
                    raise CheckFailed(
                        f"u = {u} stabilizes to {result} and {reference[0]}",
                        {"matrix": matrix.to_json(), "u": list(u)},
                    )
        return f"{s.confluence_pairs} configurations, {s.confluence_orders} orders each"

    def check_abelian(self) -> str:
        s = self.settings
        rng = self._rng(8)
        for _ in range(s.abelian_configurations):
            matrix = rng.choice(self.batch)
            u = tuple(rng.randrange(x) for x in matrix.diagonal)
            for i in range(1, matrix.n + 1):
                for j in range(i + 1, matrix.n + 1):
                    first = avalanche_op(matrix, avalanche_op(matrix, u, j), i)
                    second = avalanche_op(matrix, avalanche_op(matrix, u, i), j)
                    if first != second:
                        raise CheckFailed(
                            f"A_{i}A_{j} and A_{j}A_{i} differ on {u}",
                            {"matrix": matrix.to_json(), "u": list(u)},
                        )
        return f"{s.abelian_configurations} stable configurations"

    def _small_rate_matrices(self, rng: random.Random, count: int, max_rate: int) -> List[Tuple[ToppleMatrix, List[RateVector]]]:
        """Random n ≤ 3 matrices that admit at least one rate vector with entries ≤ max_rate."""
        found = []
        for _ in range(100 * count):
            if len(found) == count:
                break
            matrix = generate_toppling_matrix(rng, max_n=3, max_diagonal=self.settings.max_diagonal)
            rates = list(enumerate_rate_vectors(matrix, max_rate))
            if rates:
                found.append((matrix, rates))
        if len(found) < count:
            raise CheckFailed(f"only found {len(found)} of {count} matrices with small rate vectors")
        return found

    def check_arborescences(self) -> str:
        s = self.settings
        matrix, rate = self._example()
        count = count_arborescences(build_digraph(matrix, rate), budget=self.budgets.arborescence_choices)
        if count != EXAMPLE_ARBORESCENCES:
            raise CheckFailed(f"example digraph has {count} arborescences")

        rng = self._rng(9)
        for matrix, rates in self._small_rate_matrices(rng, s.arborescence_matrices, s.arborescence_max_rate):
            rate = rng.choice(rates)
            count = count_arborescences(build_digraph(matrix, rate), budget=self.budgets.arborescence_choices)
            expected = matrix.det
            for x in rate.r:
                expected *= x
            if count != expected:
                raise CheckFailed(
                    f"{count} arborescences, expected {expected}",
                    {"matrix": matrix.to_json(), "rate": list(rate.r)},
                )
            for subset in nonempty_subsets(matrix.n):
                if not scaled_determinant_identity(matrix, rate, subset):
                    raise CheckFailed(
                        f"scaled minor identity fails on {subset}",
                        {"matrix": matrix.to_json(), "rate": list(rate.r)},
                    )
        return f"example plus {s.arborescence_matrices} random digraphs"

    def check_laws(self) -> str:
        s = self.settings
        rng = self._rng(10)
        pairs = 0
        for matrix, rates in self._small_rate_matrices(rng, s.law_matrices, s.law_max_rate):
            if len(rates) > LAW_RATE_SAMPLE:
                rates = rng.sample(rates, LAW_RATE_SAMPLE)
            rates.append(primitive_rate(matrix))
            cache: Dict[Tuple[int, ...], frozenset] = {}

            def parking_of(rate: RateVector) -> frozenset:
                if rate.r not in cache:
                    cache[rate.r] = frozenset(parking_set(matrix, rate, self.budgets.box))
                return cache[rate.r]

            witness = {"matrix": matrix.to_json()}
            for a in rates:
                if parking_of(a.scaled(matrix, 2)) != parking_of(a):
                    raise CheckFailed(f"P(2r) != P(r) for r = {a.r}", witness)
                for b in rates:
                    pairs += 1
                    if parking_of(a.plus(matrix, b)) != parking_of(a) & parking_of(b):
                        raise CheckFailed(f"P(r + r') != P(r) ∩ P(r') for {a.r}, {b.r}", witness)
                    if all(x <= y for x, y in zip(a.r, b.r)) and not parking_of(b) <= parking_of(a):
                        raise CheckFailed(f"P({b.r}) not inside P({a.r})", witness)
        return f"{s.law_matrices} matrices, {pairs} rate pairs"

    def check_classes(self) -> str:
        s = self.settings
        for matrix in self.batch:
            report = class_audit(matrix, budget=self.budgets.box)
            if not report.passed:
                raise CheckFailed(report.violations[0], {"matrix": matrix.to_json(), **report.to_json()})

        rng = self._rng(11)
        bound = s.representative_range
        for _ in range(s.representatives):
            matrix = rng.choice(self.batch)
            rate = canonical_rate(matrix)
            v = tuple(rng.randint(-bound, bound) for _ in range(matrix.n))
            u = recurrent_representative(matrix, rate, v)
            if not is_recurrent(matrix, rate, u, self.budgets.topples) or not same_class(matrix, u, v).same:
                raise CheckFailed(f"representative {u} of {v} is wrong", {"matrix": matrix.to_json()})
        return f"{len(self.batch)} audits, {s.representatives} representatives"

    def check_allowed(self) -> str:
        checked = 0
        for index, matrix in enumerate(self.batch):
            rate = canonical_rate(matrix)
            recurrent = set(self.sets(index)[1])
            for u in enumerate_stable_box(matrix, self.budgets.box):
                checked += 1
                if is_r_allowed(matrix, rate, u) != (u in recurrent):
                    raise CheckFailed(f"u = {u} disagrees", {"matrix": matrix.to_json(), "u": list(u)})
        return f"{checked} stable configurations"
