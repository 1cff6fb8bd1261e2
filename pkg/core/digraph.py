# core/digraph.py
# The multigraph built from (Δ, r), its DOT export, and a brute-force
# arborescence count to cross-check determinant identities.

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Tuple

import networkx as nx

from core.errors import BudgetExceeded
from core.topple_matrix import RateVector, Rows, ToppleMatrix, submatrix

logger = logging.getLogger(__name__)

SINK = 0
DEFAULT_CHOICE_BUDGET = 10 ** 6


@dataclass(frozen=True)
class SandpileDigraph:
    """
    Vertices 0..n with 0 the sink. multiplicity[a][b] counts edges a → b.
    There are no self-loops and the sink has no out-edges.
    """
    n: int
    multiplicity: Rows

    def edges(self) -> List[Tuple[int, int]]:
        """Every edge, parallel copies repeated, sorted by (tail, head)."""
        result = []
        for a in range(self.n + 1):
            for b in range(self.n + 1):
                result.extend([(a, b)] * self.multiplicity[a][b])
        return result

    @property
    def edge_count(self) -> int:
        return sum(sum(row) for row in self.multiplicity)

    def out_degree(self, vertex: int) -> int:
        return sum(self.multiplicity[vertex])

    def to_networkx(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(self.n + 1))
        graph.add_edges_from(self.edges())
        return graph

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "multiplicity": [list(row) for row in self.multiplicity]}


def scaled_matrix(matrix: ToppleMatrix, rate: RateVector) -> Rows:
    """diag(r)·Δ, entries rᵢ·Δ_ij. Its column sums are rΔ ≥ 0."""
    return tuple(
        tuple(rate.r[i] * value for value in matrix.entries[i])
        for i in range(matrix.n)
    )


def build_digraph(matrix: ToppleMatrix, rate: RateVector) -> SandpileDigraph:
    """
    For i ≠ j, −rᵢΔ_ij edges j → i; for every j, (rΔ)_j edges j → 0.
    """
    n = matrix.n
    scaled = scaled_matrix(matrix, rate)
    multiplicity = [[0] * (n + 1) for _ in range(n + 1)]
    for j in range(1, n + 1):
        for i in range(1, n + 1):
            if i != j:
                multiplicity[j][i] = -scaled[i - 1][j - 1]
        multiplicity[j][SINK] = sum(scaled[i][j - 1] for i in range(n))
    digraph = SandpileDigraph(n=n, multiplicity=tuple(tuple(row) for row in multiplicity))
    logger.debug(f"Built digraph with {digraph.edge_count} edges for r={rate.r}")
    return digraph


def count_arborescences(
    digraph: SandpileDigraph,
    root: int = SINK,
    budget: int = DEFAULT_CHOICE_BUDGET,
) -> int:
    """
    Count spanning arborescences pointing toward `root` by choosing one
    out-neighbour per other vertex, keeping the choices that form a tree,
    and weighting each by the product of the chosen edge multiplicities.
    """
    vertices = [v for v in range(digraph.n + 1) if v != root]
    options = [
        [b for b in range(digraph.n + 1) if b != v and digraph.multiplicity[v][b] > 0]
        for v in vertices
    ]
    size = math.prod(len(targets) for targets in options)
    if size > budget:
        raise BudgetExceeded("arborescence choices", size, budget)

    total = 0
    for targets in itertools.product(*options):
        chosen = nx.DiGraph()
        chosen.add_nodes_from(range(digraph.n + 1))
        chosen.add_edges_from(zip(vertices, targets))
        if nx.is_arborescence(chosen.reverse(copy=False)):
            total += math.prod(digraph.multiplicity[v][t] for v, t in zip(vertices, targets))
    logger.debug(f"Counted {total} arborescences toward {root} over {size} choices")
    return total


def export_dot(digraph: SandpileDigraph, name: str = "sandpile") -> str:
    """Deterministic DOT text; parallel edges are written once per copy."""
    lines = [f"digraph {name} {{"]
    lines.append(f'  {SINK} [label="sink"];')
    for v in range(1, digraph.n + 1):
        lines.append(f'  {v} [label="{v}"];')
    for a, b in digraph.edges():
        lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def scaled_determinant_identity(matrix: ToppleMatrix, rate: RateVector, subset: Iterable[int]) -> bool:
    """det Δ̃[I] = (∏_{i∈I} rᵢ)·det Δ[I] > 0, with Δ̃ = diag(r)·Δ."""
    indices = tuple(sorted(set(subset)))
    scaled = ToppleMatrix.from_rows(scaled_matrix(matrix, rate))
    left = submatrix(scaled, indices).det
    right = math.prod(rate.r[i - 1] for i in indices) * submatrix(matrix, indices).det
    return left == right and left > 0
