"""
diffset toolkit - Extremal Search
Seeded hill-climb over subsets of fixed size. A move swaps one member for
one non-member; moves that do not lower the objective are accepted so the
walk can cross plateaus.
"""
from typing import Callable, Optional

import numpy as np

from ..core.exceptions import InvalidRange, UnknownSuite
from ..core.logging import get_logger
from ..core.settings import get_settings
from ..schemas.compute import SearchResult
from ..zq.covering import cov_exact, multiplicative_feasible
from ..zq.equations import minimal_divisor_d
from ..zq.literals import format_literal
from ..zq.ring import build_ctx
from ..zq.sets import SubsetZq, difference_set
from .suites import random_subset

logger = get_logger(__name__, component="search")


def max_d_objective(A: SubsetZq) -> Optional[int]:
    """Minimal d with d . Z_q inside (A - A)(A - A)"""
    return minimal_divisor_d(A, A).d


def max_covx_objective(A: SubsetZq) -> Optional[int]:
    """cov*(A - A), or None when no dilates cover"""
    differences = difference_set(A)
    if not multiplicative_feasible(differences):
        return None
    return cov_exact(differences, "multiplicative")[0]


OBJECTIVES: dict[str, Callable[[SubsetZq], Optional[int]]] = {
    "max_d": max_d_objective,
    "max_covx": max_covx_objective,
}


def _ratio(objective: str, A: SubsetZq, value: Optional[int]) -> Optional[float]:
    """max_d: d beta^omega(q); max_covx: cov* / (1/alpha + 1)"""
    if value is None:
        return None
    if objective == "max_d":
        return value * A.density ** A.ctx.omega
    return value / (1 / A.density + 1)


def _score(value: Optional[int]) -> int:
    return -1 if value is None else value


def _swap(A: SubsetZq, rng: np.random.Generator) -> SubsetZq:
    members = A.indices()
    outside = np.flatnonzero(~A.indicator())
    if members.size == 0 or outside.size == 0:
        return A
    drop = int(rng.choice(members))
    add = int(rng.choice(outside))
    return SubsetZq(A.ctx, (A.bits & ~(1 << drop)) | (1 << add))


def hill_climb(
    objective: str,
    q: int,
    density: float,
    budget: Optional[int] = None,
    seed: int = 0,
) -> SearchResult:
    """
    Maximize an objective over subsets of Z_q of size round(density q).

    Args:
        objective: 'max_d' or 'max_covx'
        q: Modulus
        density: beta for max_d, alpha for max_covx
        budget: Number of moves; 0 returns the initial instance
        seed: Seed of the walk

    Returns:
        Best instance, with its value recomputed from scratch

    Raises:
        UnknownSuite: If the objective is not registered
        InvalidRange: If the density is outside (0, 1] or budget is negative
    """
    try:
        evaluate = OBJECTIVES[objective]
    except KeyError:
        raise UnknownSuite(
            f"Unknown objective '{objective}'; choose from {', '.join(OBJECTIVES)}"
        ) from None
    if not 0.0 < density <= 1.0:
        raise InvalidRange(f"Density must lie in (0, 1], got {density}")
    if budget is None:
        budget = get_settings().search.default_budget
    if budget < 0:
        raise InvalidRange(f"Budget must be nonnegative, got {budget}")

    ctx = build_ctx(q)
    rng = np.random.default_rng(seed)
    current = random_subset(ctx, density, rng)
    current_value = evaluate(current)
    best, best_value = current, current_value
    improvements = 0

    for _ in range(budget):
        candidate = _swap(current, rng)
        value = evaluate(candidate)
        if _score(value) >= _score(current_value):
            current, current_value = candidate, value
            if _score(value) > _score(best_value):
                best, best_value = candidate, value
                improvements += 1

    verified_value = evaluate(best)
    logger.info(
        f"{objective} on Z_{q}: best {best_value} after {budget} moves ({improvements} improvements)",
        extra={"objective": objective},
    )
    return SearchResult(
        objective=objective,
        q=q,
        instance={"q": q, "A": format_literal(best), "size": best.size},
        value=verified_value,
        ratio=_ratio(objective, best, verified_value),
        verified=verified_value == best_value,
        budget=budget,
        improvements=improvements,
        seed=seed,
    )
