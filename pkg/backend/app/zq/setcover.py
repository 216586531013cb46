"""
Exact minimum set cover over a bitmask universe.

Candidates are integer masks tagged with a label (the shift or dilator that
produced them). The solver deduplicates identical masks, drops dominated
ones, seeds the incumbent with the greedy cover and then runs a depth-first
branch-and-bound that always branches on the uncovered element with the
fewest covering candidates.
"""
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..core.exceptions import InfeasibleCover, SearchBudgetExceeded
from ..core.logging import get_logger
from .sets import iter_bits

logger = get_logger(__name__, component="setcover")

# Dominance filtering is quadratic in the number of candidates
_DOMINANCE_LIMIT = 4096


@dataclass(frozen=True)
class CoverSolution:
    """Labels of an optimal cover and search statistics"""

    labels: tuple[int, ...]
    greedy_size: int
    nodes: int

    @property
    def size(self) -> int:
        return len(self.labels)


class ExactCoverSolver:
    """
    Minimum cover of {0, ..., n-1} by candidate masks.

    Args:
        universe_size: n
        candidates: (label, mask) pairs
        node_limit: Branch-and-bound node cap
    """

    def __init__(
        self,
        universe_size: int,
        candidates: Iterable[tuple[int, int]],
        node_limit: int = 50_000_000,
    ):
        self.universe = (1 << universe_size) - 1
        self.universe_size = universe_size
        self.node_limit = node_limit
        self._label_of: dict[int, int] = {}
        self._mask_of: dict[int, int] = {}
        for label, mask in candidates:
            mask &= self.universe
            self._mask_of.setdefault(label, mask)
            if mask and mask not in self._label_of:
                self._label_of[mask] = label
        self.nodes = 0
        self._best: list[int] = []

    def feasible(self, covered: int = 0) -> bool:
        union = covered
        for mask in self._label_of:
            union |= mask
        return union == self.universe

    def _reduced(self) -> list[int]:
        """Masks with dominated ones removed, largest first"""
        masks = sorted(self._label_of, key=lambda m: (-m.bit_count(), self._label_of[m]))
        if len(masks) > _DOMINANCE_LIMIT:
            return masks
        kept: list[int] = []
        for mask in masks:
            if not any(mask & ~other == 0 for other in kept):
                kept.append(mask)
        return kept

    def greedy(self, covered: int = 0) -> list[int]:
        """Masks picked by largest marginal gain (first on ties)"""
        masks = self._reduced()
        chosen: list[int] = []
        while covered != self.universe:
            best = max(masks, key=lambda m: (m & ~covered).bit_count())
            if best & ~covered == 0:
                raise InfeasibleCover("Candidates do not cover the universe")
            chosen.append(best)
            covered |= best
        return chosen

    def solve(self, forced: Sequence[int] = ()) -> CoverSolution:
        """
        Minimum cover containing the forced labels.

        Args:
            forced: Labels that must belong to the cover

        Raises:
            InfeasibleCover: If no cover exists
            SearchBudgetExceeded: If the node limit is hit
        """
        forced_masks = [self._mask_of.get(label, 0) for label in forced]
        covered = 0
        for mask in forced_masks:
            covered |= mask
        if not self.feasible(covered):
            raise InfeasibleCover("Candidates do not cover the universe")

        masks = self._reduced()
        incumbent = self.greedy(covered)
        self._best = incumbent
        greedy_size = len(forced) + len(incumbent)

        # candidates covering each element, best first
        covering: dict[int, list[int]] = {e: [] for e in range(self.universe_size)}
        for mask in masks:
            for e in iter_bits(mask):
                covering[e].append(mask)

        self.nodes = 0
        self._branch(covered, [], masks, covering)
        labels = [self._label_of[m] for m in self._best]
        labels.extend(forced)
        logger.debug(
            f"Cover of size {len(labels)} (greedy {greedy_size}) after {self.nodes} nodes"
        )
        return CoverSolution(labels=tuple(sorted(set(labels))), greedy_size=greedy_size, nodes=self.nodes)

    def _branch(
        self, covered: int, chosen: list[int], masks: list[int], covering: dict[int, list[int]]
    ) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise SearchBudgetExceeded(f"Cover search exceeded {self.node_limit} nodes")
        uncovered = self.universe & ~covered
        if uncovered == 0:
            if len(chosen) < len(self._best):
                self._best = list(chosen)
            return
        if len(chosen) + 1 >= len(self._best):
            return

        remaining = uncovered.bit_count()
        widest = max((m & uncovered).bit_count() for m in masks)
        if len(chosen) + -(-remaining // widest) >= len(self._best):
            return

        pivot = min(iter_bits(uncovered), key=lambda e: len(covering[e]))
        options = sorted(covering[pivot], key=lambda m: -(m & uncovered).bit_count())
        for mask in options:
            chosen.append(mask)
            self._branch(covered | mask, chosen, masks, covering)
            chosen.pop()


def minimum_cover(
    universe_size: int,
    candidates: Iterable[tuple[int, int]],
    forced: Sequence[int] = (),
    node_limit: int = 50_000_000,
) -> Optional[CoverSolution]:
    """Convenience wrapper; None when infeasible"""
    solver = ExactCoverSolver(universe_size, candidates, node_limit=node_limit)
    try:
        return solver.solve(forced)
    except InfeasibleCover:
        return None
