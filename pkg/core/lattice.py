# core/lattice.py
# Equivalence modulo the row lattice of Δ, recurrent class representatives,
# and the audit tying parking functions, recurrent configurations and det Δ.

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from core.errors import FixedPointCapExceeded, InvalidConfiguration, SandpileError
from core.parking import enumerate_parking, recurrent_to_parking
from core.sandpile import DEFAULT_BOX_BUDGET, enumerate_recurrent, stabilize, stable_box_size
from core.topple_matrix import RateVector, ToppleMatrix, canonical_rate

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class ClassResult:
    """Whether v − w = xΔ for an integer x, and that x when it exists."""
    same: bool
    witness: Optional[Vector] = None


def _check_length(matrix: ToppleMatrix, v: Sequence[int], label: str) -> Vector:
    v = tuple(v)
    if len(v) != matrix.n:
        raise InvalidConfiguration(f"{label} has length {len(v)}, matrix has n={matrix.n}")
    return v


def _times_adjugate(matrix: ToppleMatrix, v: Sequence[int]) -> Vector:
    adj = matrix.adj
    n = matrix.n
    return tuple(sum(v[i] * adj[i][j] for i in range(n)) for j in range(n))


def same_class(matrix: ToppleMatrix, v: Sequence[int], w: Sequence[int]) -> ClassResult:
    """
    Decide v ∼ w. Since adj(Δ)·Δ = det·I, the only rational solution of
    xΔ = v − w is x = (v − w)·adj(Δ)/det, so v ∼ w iff that is integral.
    """
    matrix.require_toppling()
    v = _check_length(matrix, v, "v")
    w = _check_length(matrix, w, "w")
    det = matrix.det
    scaled = _times_adjugate(matrix, tuple(a - b for a, b in zip(v, w)))
    if any(x % det for x in scaled):
        return ClassResult(same=False)
    return ClassResult(same=True, witness=tuple(x // det for x in scaled))


def class_key(matrix: ToppleMatrix, v: Sequence[int]) -> Vector:
    """A canonical label of the class of v: v·adj(Δ) reduced mod det."""
    det = matrix.det
    return tuple(x % det for x in _times_adjugate(matrix, v))


def count_classes(matrix: ToppleMatrix, vectors: Iterable[Sequence[int]]) -> int:
    return len({class_key(matrix, v) for v in vectors})


def group_order(matrix: ToppleMatrix) -> int:
    """|Zⁿ/⟨Δ⟩| = det Δ."""
    matrix.require_toppling()
    return matrix.det


def recurrent_representative(
    matrix: ToppleMatrix,
    rate: RateVector,
    v: Sequence[int],
    max_iterations: Optional[int] = None,
) -> Vector:
    """
    The recurrent configuration in the class of an arbitrary integer vector v.

    v is first shifted by k·det·1 (a lattice vector, since det·1 = (1·adj)Δ)
    with the least k ≥ 0 that makes it nonnegative, then stabilized, then
    u ← stabilize(u + rΔ) is repeated until it stops moving.

    Raises:
        FixedPointCapExceeded: if no fixed point appears within the
            stable-box size; that is an engine bug, not bad input.
    """
    matrix.require_toppling()
    v = _check_length(matrix, v, "v")
    det = matrix.det
    lowest = min(v)
    k = -(lowest // det) if lowest < 0 else 0
    shifted = tuple(x + k * det for x in v)
    logger.debug(f"Shifted {v} by {k}·{det}·1 to {shifted}")

    current, _ = stabilize(matrix, shifted)
    cap = max_iterations if max_iterations is not None else stable_box_size(matrix) + 1
    seen = {current}
    for _ in range(cap):
        # Adding c = rΔ keeps the class; stabilizing drifts toward R
        loaded = tuple(a + b for a, b in zip(current, rate.c))
        following, _ = stabilize(matrix, loaded)
        if following == current:
            return current
        # Every cycle of this map is a fixed point; a revisit means a bug.
        if following in seen:
            raise SandpileError(f"iteration cycled through {following} without a fixed point")
        seen.add(following)
        current = following
    raise FixedPointCapExceeded(cap)


@dataclass
class AuditReport:
    det: int
    parking_count: int
    recurrent_count: int
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> Dict[str, Any]:
        return {
            "det": self.det,
            "parking_count": self.parking_count,
            "recurrent_count": self.recurrent_count,
            "violations": list(self.violations),
        }


def class_audit(
    matrix: ToppleMatrix,
    rate: Optional[RateVector] = None,
    budget: int = DEFAULT_BOX_BUDGET,
) -> AuditReport:
    """
    Enumerate P and R and check that distinct parking functions lie in
    distinct classes, that d − u maps R into P with one recurrent
    configuration per class, and that |P| = |R| = det Δ.
    """
    matrix.require_toppling()
    rate = rate or canonical_rate(matrix)
    parking = enumerate_parking(matrix, budget)
    recurrent = enumerate_recurrent(matrix, rate, budget)
    report = AuditReport(det=matrix.det, parking_count=len(parking), recurrent_count=len(recurrent))

    by_class: Dict[Vector, Vector] = {}
    for f in parking:
        key = class_key(matrix, f)
        if key in by_class:
            report.violations.append(f"parking functions {by_class[key]} and {f} share a class")
        else:
            by_class[key] = f

    parking_set = set(parking)
    recurrent_classes: Dict[Vector, Vector] = {}
    for u in recurrent:
        image = recurrent_to_parking(matrix, u)
        if image not in parking_set:
            report.violations.append(f"recurrent {u} maps to {image}, which is not a parking function")
        key = class_key(matrix, u)
        if key in recurrent_classes:
            report.violations.append(f"recurrent configurations {recurrent_classes[key]} and {u} share a class")
        else:
            recurrent_classes[key] = u

    if not len(parking) == len(recurrent) == matrix.det:
        report.violations.append(
            f"counts disagree: |P| = {len(parking)}, |R| = {len(recurrent)}, det = {matrix.det}"
        )

    logger.info(f"Class audit det={matrix.det}: {len(report.violations)} violations")
    return report
