# engine/commands.py
# One method per CLI subcommand, each returning a renderable CommandResult.

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from core.check_events_manager import CheckEventManager
from core.digraph import build_digraph, count_arborescences, export_dot, scaled_matrix
from core.errors import BudgetExceeded, UsageError
from core.lattice import group_order, recurrent_representative, same_class
from core.parking import (
    enumerate_parking,
    find_parking_violation,
    is_dhar_allowed,
    is_parking_greedy,
    is_r_allowed,
    parking_set,
    parking_to_recurrent,
)
from core.sandpile import enumerate_recurrent, is_recurrent, stabilize
from core.topple_matrix import RateVector, ToppleMatrix, canonical_rate
from core.vertex_policy import VertexPolicy, policy_by_name
from engine.input_handler import InputHandler
from engine.run_config import RunConfig
from engine.selftest import SelfTestRunner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def fmt(vector: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in vector) + ")"


def _flag(value: bool) -> str:
    return "true" if value else "false"


@dataclass
class CommandResult:
    exit_code: int
    payload: Dict[str, Any] = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.payload, indent=2, sort_keys=True) + "\n"
        return "\n".join(self.lines) + "\n"


class CommandRunner:
    """Loads the matrix and rate named by a RunConfig and runs one subcommand."""

    def __init__(self, config: RunConfig, event_manager: Optional[CheckEventManager] = None):
        self.config = config
        self.input_handler = InputHandler()
        self.event_manager = event_manager or CheckEventManager()
        self._matrix: Optional[ToppleMatrix] = None

    def matrix(self) -> ToppleMatrix:
        if self._matrix is None:
            self._matrix = self.input_handler.load_matrix(self.config.input_path)
        return self._matrix

    def toppling_matrix(self) -> ToppleMatrix:
        matrix = self.matrix()
        matrix.require_toppling()
        return matrix

    def rate(self, matrix: ToppleMatrix) -> RateVector:
        if self.config.rate is None:
            return canonical_rate(matrix)
        return RateVector.of(matrix, self.config.rate)

    def policy(self) -> VertexPolicy:
        try:
            return policy_by_name(self.config.policy, self.config.seed)
        except ValueError as e:
            raise UsageError(str(e)) from e

    def cmd_validate(self) -> CommandResult:
        matrix = self.matrix()
        report = matrix.report
        lines = [f"toppling: {_flag(report.is_toppling)}", f"det: {report.det}"]
        if report.row_certificate:
            lines.append(f"row certificate r: {fmt(report.row_certificate.r)} (rΔ = {fmt(report.row_certificate.c)})")
            lines.append(f"column certificate h: {fmt(report.column_certificate)}")
        lines.extend(f"violation: {v}" for v in report.violations)
        return CommandResult(
            exit_code=EXIT_OK if report.is_toppling else EXIT_FALSE,
            payload=report.to_json(),
            lines=lines,
        )

    def cmd_parking(self, action: str, vector: Optional[str] = None) -> CommandResult:
        matrix = self.toppling_matrix()
        rate = self.rate(matrix)
        if action == "enumerate":
            if self.config.rate is None:
                functions = enumerate_parking(matrix, self.config.budgets.box)
            else:
                functions = parking_set(matrix, rate, self.config.budgets.box)
            matches = len(functions) == matrix.det
            lines = [fmt(f) for f in functions]
            lines += [f"count: {len(functions)}", f"det: {matrix.det}", f"count == det: {_flag(matches)}"]
            payload = {
                "parking_functions": [list(f) for f in functions],
                "count": len(functions),
                "det": matrix.det,
                "count_equals_det": matches,
            }
            return CommandResult(EXIT_OK if matches else EXIT_FALSE, payload, lines)

        if action != "test":
            raise UsageError(f"unknown parking action {action!r}")
        f = self.input_handler.parse_vector(vector, matrix.n)
        result = is_parking_greedy(matrix, rate, f, self.policy())
        lines = [f"{fmt(f)} parking function: {_flag(result.is_parking)}"]
        payload: Dict[str, Any] = {"f": list(f), "rate": list(rate.r), "is_parking": result.is_parking}
        if self.config.witness:
            payload.update(result.to_json())
            if result.is_parking:
                lines.append("sequence: " + " ".join(str(v) for v in result.sequence))
            else:
                lines.append(f"stalled at step {result.stall_step}")
                try:
                    chi = find_parking_violation(matrix, rate, f, self.config.budgets.omega)
                    payload["failing_chi"] = list(chi) if chi else None
                    if chi:
                        lines.append(f"failing χ: {fmt(chi)}")
                except BudgetExceeded as e:
                    logger.info(f"Skipping χ witness: {e}")
        return CommandResult(EXIT_OK if result.is_parking else EXIT_FALSE, payload, lines)

    def cmd_recurrent(self, action: str, vector: Optional[str] = None) -> CommandResult:
        matrix = self.toppling_matrix()
        rate = self.rate(matrix)
        budgets = self.config.budgets
        if action == "enumerate":
            configurations = enumerate_recurrent(matrix, rate, budgets.box, budgets.topples)
            matches = len(configurations) == matrix.det
            lines = [fmt(u) for u in configurations]
            lines += [f"count: {len(configurations)}", f"det: {matrix.det}", f"count == det: {_flag(matches)}"]
            payload = {
                "recurrent_configurations": [list(u) for u in configurations],
                "count": len(configurations),
                "det": matrix.det,
                "count_equals_det": matches,
            }
            return CommandResult(EXIT_OK if matches else EXIT_FALSE, payload, lines)

        if action != "test":
            raise UsageError(f"unknown recurrent action {action!r}")
        u = self.input_handler.parse_vector(vector, matrix.n)
        recurrent = is_recurrent(matrix, rate, u, budgets.topples)
        lines = [f"{fmt(u)} recurrent: {_flag(recurrent)}"]
        payload: Dict[str, Any] = {"u": list(u), "rate": list(rate.r), "is_recurrent": recurrent}
        if self.config.witness:
            loaded = tuple(a + b for a, b in zip(u, rate.c))
            result, record = stabilize(matrix, loaded, cap=budgets.topples)
            payload["loaded"] = list(loaded)
            payload["stabilized"] = list(result)
            payload["record"] = record.to_json()
            lines.append(f"u + rΔ = {fmt(loaded)} stabilizes to {fmt(result)}")
            allowed = is_r_allowed(matrix, rate, u)
            payload["r_allowed"] = allowed
            lines.append(f"r-allowed: {_flag(allowed)}")
            try:
                subset_allowed = is_dhar_allowed(matrix, u, budgets.subsets_max_n)
                payload["subset_allowed"] = subset_allowed
                lines.append(f"subset-allowed: {_flag(subset_allowed)}")
            except BudgetExceeded as e:
                logger.info(f"Skipping subset-allowed test: {e}")
        return CommandResult(EXIT_OK if recurrent else EXIT_FALSE, payload, lines)

    def cmd_bijection(self) -> CommandResult:
        matrix = self.toppling_matrix()
        rate = self.rate(matrix)
        budgets = self.config.budgets
        parking = parking_set(matrix, rate, budgets.box)
        recurrent = enumerate_recurrent(matrix, rate, budgets.box, budgets.topples)
        pairs = [(f, parking_to_recurrent(matrix, f)) for f in parking]
        images = sorted(u for _, u in pairs)
        verified = images == recurrent and len(set(images)) == len(parking)
        if verified:
            lines = [f"bijection verified: {len(pairs)} pairs"]
        else:
            lines = [f"bijection failed: {len(parking)} parking functions, {len(recurrent)} recurrent configurations"]
        if self.config.witness:
            lines.extend(f"{fmt(f)} <-> {fmt(u)}" for f, u in pairs)
        payload = {
            "verified": verified,
            "pairs": [{"parking": list(f), "recurrent": list(u)} for f, u in pairs],
            "parking_count": len(parking),
            "recurrent_count": len(recurrent),
        }
        return CommandResult(EXIT_OK if verified else EXIT_FALSE, payload, lines)

    def cmd_classes(self, vectors: Sequence[str]) -> CommandResult:
        matrix = self.toppling_matrix()
        rate = self.rate(matrix)
        if not vectors:
            raise UsageError("classes needs at least one vector")
        parsed = self.input_handler.parse_vectors(vectors, matrix.n)
        lines = [f"group order: {group_order(matrix)}"]
        payload: Dict[str, Any] = {"group_order": group_order(matrix), "representatives": [], "comparisons": []}
        for v in parsed:
            representative = recurrent_representative(matrix, rate, v)
            lines.append(f"{fmt(v)} ~ recurrent {fmt(representative)}")
            payload["representatives"].append({"v": list(v), "recurrent": list(representative)})

        all_same = True
        for w in parsed[1:]:
            result = same_class(matrix, parsed[0], w)
            all_same = all_same and result.same
            detail = f" (x = {fmt(result.witness)})" if result.same else ""
            lines.append(f"{fmt(parsed[0])} ~ {fmt(w)}: {_flag(result.same)}{detail}")
            payload["comparisons"].append({
                "v": list(parsed[0]),
                "w": list(w),
                "same": result.same,
                "witness": list(result.witness) if result.witness is not None else None,
            })
        return CommandResult(EXIT_OK if all_same else EXIT_FALSE, payload, lines)

    def cmd_stabilize(self, vector: Optional[str]) -> CommandResult:
        matrix = self.toppling_matrix()
        u = self.input_handler.parse_vector(vector, matrix.n)
        result, record = stabilize(matrix, u, self.policy(), cap=self.config.budgets.topples)
        lines = [f"stable: {fmt(result)}", f"representation: {fmt(record.representation)}"]
        if self.config.witness:
            lines.append("sequence: " + " ".join(str(v) for v in record.sequence))
        payload = {"u": list(u), "stable": list(result), "record": record.to_json()}
        return CommandResult(EXIT_OK, payload, lines)

    def cmd_digraph(self) -> CommandResult:
        matrix = self.toppling_matrix()
        rate = self.rate(matrix)
        digraph = build_digraph(matrix, rate)
        arborescences = count_arborescences(digraph, budget=self.config.budgets.arborescence_choices)
        scaled_det = ToppleMatrix.from_rows(scaled_matrix(matrix, rate)).det
        expected = math.prod(rate.r) * matrix.det
        agrees = arborescences == scaled_det == expected
        dot = export_dot(digraph)
        if self.config.dot_path:
            Path(self.config.dot_path).write_text(dot, encoding="utf-8")
            logger.info(f"Wrote DOT graph to {self.config.dot_path}")

        lines = [
            f"rate: {fmt(rate.r)}",
            f"edges: {digraph.edge_count}",
            f"arborescences toward sink: {arborescences}",
            f"det of scaled matrix: {scaled_det}",
            f"product of rates times det: {expected}",
            f"matrix-tree identity: {_flag(agrees)}",
        ]
        if not self.config.dot_path:
            lines.append(dot.rstrip("\n"))
        payload = {
            **digraph.to_json(),
            "rate": list(rate.r),
            "arborescences": arborescences,
            "scaled_det": scaled_det,
            "expected": expected,
            "identity_holds": agrees,
            "dot": dot,
        }
        return CommandResult(EXIT_OK if agrees else EXIT_FALSE, payload, lines)

    def cmd_selftest(self) -> CommandResult:
        runner = SelfTestRunner(
            settings=self.config.selftest,
            budgets=self.config.budgets,
            seed=self.config.seed,
            event_manager=self.event_manager,
        )
        results = runner.run()
        passed = all(r.passed for r in results)
        lines = [f"[{'PASS' if r.passed else 'FAIL'}] {r.criterion}. {r.name}: {r.detail}" for r in results]
        lines.append(f"selftest: {sum(r.passed for r in results)}/{len(results)} criteria passed")
        payload = {"passed": passed, "criteria": [r.to_json() for r in results]}
        return CommandResult(EXIT_OK if passed else EXIT_FALSE, payload, lines)
