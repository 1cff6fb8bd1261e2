# core/vertex_policy.py
# Policies that pick one vertex out of a set of candidates.

import random
from abc import ABC, abstractmethod
from typing import Optional, Sequence


class VertexPolicy(ABC):
    """
    Chooses which candidate vertex acts next.

    Used both for the toppling order during stabilization and for the
    tie-break between eligible vertices in the greedy parking test. Results
    never depend on the policy; only the recorded traces do.
    """
    name = "abstract"

    @abstractmethod
    def choose(self, candidates: Sequence[int]) -> int:
        """Pick one element of a nonempty, ascending list of 1-based vertices."""


class LowestIndexPolicy(VertexPolicy):
    name = "lowest"

    def choose(self, candidates: Sequence[int]) -> int:
        return candidates[0]


class HighestIndexPolicy(VertexPolicy):
    name = "highest"

    def choose(self, candidates: Sequence[int]) -> int:
        return candidates[-1]


class RandomPolicy(VertexPolicy):
    """Uniform choice driven by its own seeded generator."""
    name = "random"

    def __init__(self, rng: Optional[random.Random] = None, seed: int = 0):
        self.rng = rng if rng is not None else random.Random(seed)

    def choose(self, candidates: Sequence[int]) -> int:
        return self.rng.choice(candidates)


def policy_by_name(name: str, seed: int = 0) -> VertexPolicy:
    """Look up a policy by its CLI name."""
    if name == LowestIndexPolicy.name:
        return LowestIndexPolicy()
    if name == HighestIndexPolicy.name:
        return HighestIndexPolicy()
    if name == RandomPolicy.name:
        return RandomPolicy(seed=seed)
    raise ValueError(f"unknown policy {name!r}")
