"""
Regularization: descend through divisor fibers until every large divisor
has near-uniform fibers.

A set A in Z_m^n satisfies the condition for (epsilon, M) when for every
divisor d of m with d >= M

    max_xi |A cap pi_d^{-1}(xi)| <= |A| / d^(1 - epsilon).

While some divisor violates it, the densest violating fiber is kept and
rescaled into Z_{m/d}; the density grows by a factor above M^epsilon per step.
"""
from dataclasses import dataclass, field
from math import ceil, log
from typing import Any, Literal, Union

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions import EmptySetError
from ..core.logging import get_logger
from .ring import ring_for
from .sets import Subset2D, SubsetZq

logger = get_logger(__name__, component="regularizer")

# Relative slack on the fiber inequality so float rounding never flags a tie
_RELATIVE_SLACK = 1e-12

DescentKind = Literal["prime_power", "composite"]


@dataclass(frozen=True)
class Descent:
    """One step of the chain: keep the fiber xi modulo q_j"""

    q_j: int
    xi: tuple[int, ...]
    kind: DescentKind
    fiber_size: int
    ratio: float


@dataclass(frozen=True)
class RegularizationResult:
    """
    Outcome of regularize().

    Attributes:
        a_star: A* in place, a subset of the original A
        a_star_normalized: A* rescaled to a subset of Z_{q*} (resp. Z_{q*}^2)
        q_star: Effective modulus
        chain: Descents taken, in order
        shift: Residue vector s with A* = s + (q/q*) * normalized, so
            pi_{q/q*}(A*) = {s mod q/q*}
        epsilon: Exponent used
        M: Lower bound on divisors used
        initial_density: Density of the input
    """

    a_star: Union[SubsetZq, Subset2D]
    a_star_normalized: Union[SubsetZq, Subset2D]
    q_star: int
    chain: tuple[Descent, ...]
    shift: tuple[int, ...]
    epsilon: float
    M: float
    initial_density: float = field(default=0.0)

    @property
    def q(self) -> int:
        return self.a_star.ctx.q

    def to_dict(self) -> dict[str, Any]:
        from .literals import format_literal

        return {
            "q": self.q,
            "q_star": self.q_star,
            "epsilon": self.epsilon,
            "M": self.M,
            "size": self.a_star.size,
            "shift": list(self.shift),
            "chain": [
                {"q_j": d.q_j, "xi": list(d.xi), "kind": d.kind, "fiber_size": d.fiber_size}
                for d in self.chain
            ],
            "a_star": format_literal(self.a_star),
            "a_star_normalized": format_literal(self.a_star_normalized),
        }


def _points(A: Union[SubsetZq, Subset2D]) -> NDArray[np.int64]:
    """(n, dim) coordinate array"""
    if isinstance(A, Subset2D):
        xs, ys = A.coordinates()
        return np.stack([xs, ys], axis=1)
    return A.indices()[:, None]


def _from_points(points: NDArray[np.int64], m: int, two_dim: bool) -> Union[SubsetZq, Subset2D]:
    ctx = ring_for(m)
    if two_dim:
        return Subset2D.from_coordinates(ctx, points[:, 0], points[:, 1])
    return SubsetZq.from_indices(ctx, points[:, 0])


def _fiber_histogram(points: NDArray[np.int64], d: int) -> NDArray[np.int64]:
    """Counts per fiber label, labels flattened in row-major order of Z_d^n"""
    residues = points % d
    labels = np.ravel_multi_index(tuple(residues.T), (d,) * points.shape[1])
    return np.bincount(labels, minlength=d ** points.shape[1])


def _is_prime_power(d: int) -> bool:
    return len(ring_for(d).factors) == 1


def _worst_violation(
    points: NDArray[np.int64], m: int, epsilon: float, M: float
) -> tuple[int, tuple[int, ...], int, float] | None:
    """
    Largest relative violation count * d^(1-eps) / |A| over divisors d >= M.

    Ties keep the smallest d (ascending scan, strict improvement) and the
    smallest xi (first argmax).
    """
    n = len(points)
    best = None
    for d in ring_for(m).divisors:
        if d < M or d == 1:
            continue
        counts = _fiber_histogram(points, d)
        flat = int(np.argmax(counts))
        count = int(counts[flat])
        ratio = count * d ** (1 - epsilon) / n
        if ratio <= 1 + _RELATIVE_SLACK:
            continue
        if best is None or ratio > best[3]:
            xi = tuple(int(c) for c in np.unravel_index(flat, (d,) * points.shape[1]))
            best = (d, xi, count, ratio)
    return best


def regularize(
    A: Union[SubsetZq, Subset2D], epsilon: float, M: float
) -> RegularizationResult:
    """
    Regularize A.

    Args:
        A: Nonempty subset of Z_q or Z_q^2
        epsilon: Exponent in (0, 1)
        M: Smallest divisor considered, at least 2

    Returns:
        RegularizationResult whose condition has been re-checked

    Raises:
        EmptySetError: If A is empty
        ValueError: On parameters out of range
    """
    if A.size == 0:
        raise EmptySetError("Cannot regularize the empty set")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if M < 2:
        raise ValueError(f"M must be at least 2, got {M}")

    two_dim = isinstance(A, Subset2D)
    q = A.ctx.q
    points = _points(A)
    shift = np.zeros(points.shape[1], dtype=np.int64)
    scale = 1
    m = q
    chain: list[Descent] = []

    while True:
        violation = _worst_violation(points, m, epsilon, M)
        if violation is None:
            break
        d, xi, count, ratio = violation
        xi_vec = np.array(xi, dtype=np.int64)
        keep = np.all(points % d == xi_vec, axis=1)
        points = (points[keep] - xi_vec) // d
        shift = shift + scale * xi_vec
        scale *= d
        m //= d
        kind: DescentKind = "prime_power" if _is_prime_power(d) else "composite"
        chain.append(Descent(q_j=d, xi=xi, kind=kind, fiber_size=count, ratio=ratio))
        logger.debug(f"Descent q_j={d} xi={xi} kept {count} points, modulus now {m}")

    normalized = _from_points(points, m, two_dim)
    in_place = _from_points((shift + scale * points) % q, q, two_dim)
    result = RegularizationResult(
        a_star=in_place,
        a_star_normalized=normalized,
        q_star=m,
        chain=tuple(chain),
        shift=tuple(int(s) for s in shift),
        epsilon=epsilon,
        M=M,
        initial_density=A.density,
    )
    if not verify_regularity(result, original=A):
        raise AssertionError(f"Regularized set fails its own condition (q={q})")
    return result


def verify_regularity(
    result: RegularizationResult, original: Union[SubsetZq, Subset2D, None] = None
) -> bool:
    """
    Independent check of a RegularizationResult.

    Re-counts fibers over every divisor d >= M of q*, checks that the
    in-place set lies in one fiber modulo q/q* and, given the original set,
    that A* is contained in it.
    """
    normalized = result.a_star_normalized
    n = normalized.size
    if n == 0 or n != result.a_star.size:
        return False
    points = _points(normalized)
    for d in ring_for(result.q_star).divisors:
        if d < result.M or d == 1:
            continue
        worst = int(_fiber_histogram(points, d).max())
        if worst * d ** (1 - result.epsilon) > n * (1 + _RELATIVE_SLACK):
            return False

    outer = result.q // result.q_star
    in_place = _points(result.a_star)
    if len(np.unique(in_place % outer, axis=0)) != 1:
        return False
    if original is not None and not result.a_star.issubset(original):
        return False
    return True


def chain_length_bound(delta: float, epsilon: float, M: float) -> int:
    """ceil(log(1/delta) / (epsilon log M))"""
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return ceil(log(1 / delta) / (epsilon * log(M)))
