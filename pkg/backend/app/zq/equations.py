"""
Solution counting for (a1-b1)(a2-b2) = lam and (a1-b1)^2 - (a2-b2)^2 = lam
over a in A, b in B subsets of Z_q^2, and minimal-divisor inclusions
d . Z_q subset of (A-A)(B-B).

Counting paths:
    pairs   enumerate all |A||B| pairs (the reference path)
    fft     cyclic correlation of the indicators, then a histogram of the form
    crt     product of the counts over the prime-power components, when both
            sets are CRT products
"""
from dataclasses import dataclass
from functools import lru_cache
from math import log, prod, sqrt
from typing import Literal, Optional

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions import (
    EmptySetError,
    ModulusMismatch,
    NotADivisor,
    NotAUnit,
    NotPrime,
)
from ..core.logging import get_logger
from ..schemas.report import VerificationReport
from .ring import RingCtx, is_prime, ring_for, units
from .sets import (
    Subset2D,
    SubsetZq,
    dilate_subgroup_subset_test,
    difference_set,
    fiber_counts,
    pack_bits,
    product_set,
    project,
)

logger = get_logger(__name__, component="equations")

Form = Literal["product", "squarediff"]
Mode = Literal["units", "full"]
Method = Literal["auto", "pairs", "fft", "crt"]

# Pair enumeration is used up to this many (a, b) pairs
PAIR_LIMIT = 1 << 24
_PAIR_CHUNK = 1 << 22


@dataclass(frozen=True)
class SolutionCount:
    """
    Number of solutions for one lam.

    Attributes:
        lam: Right-hand side
        count: Exact number of pairs (a, b)
        main_term: |A||B| nu(lam) / q^2, nu(lam) = #{(u, v) : F(u, v) = lam}
        deviation: |count - main_term|
        method: Counting path used
    """

    lam: int
    count: int
    main_term: float
    deviation: float
    method: str


@dataclass(frozen=True)
class DivisorResult:
    """
    Smallest d with d . Z_q (or d . Z_q^*) inside the certificate; None if none exists.

    For d > 1 in one dimension, fiber is the densest fiber of B mod d shifted
    into d Z_q, and fiber_certifies says whether (A - A)(fiber - fiber) alone
    already contains d . Z_q.
    """

    d: Optional[int]
    certificate: SubsetZq
    fiber: Optional[SubsetZq] = None
    fiber_certifies: Optional[bool] = None


# ==================== Value tables ====================


@lru_cache(maxsize=64)
def form_table(q: int, form: Form) -> NDArray[np.int64]:
    """F(u, v) mod q over Z_q^2, row-major"""
    u = np.arange(q, dtype=np.int64)
    if form == "product":
        table = np.multiply.outer(u, u) % q
    elif form == "squarediff":
        sq = u * u % q
        table = np.subtract.outer(sq, sq) % q
    else:
        raise ValueError(f"Unknown form '{form}'")
    table.setflags(write=False)
    return table


@lru_cache(maxsize=64)
def form_multiplicities(q: int, form: Form) -> NDArray[np.int64]:
    """nu(lam) for lam in Z_q"""
    return np.bincount(form_table(q, form).ravel(), minlength=q)


def _apply_form(u: NDArray[np.int64], v: NDArray[np.int64], q: int, form: Form) -> NDArray[np.int64]:
    if form == "product":
        return u * v % q
    return (u * u - v * v) % q


# ==================== Counting ====================


def _check_pair(A: Subset2D, B: Subset2D) -> None:
    if A.ctx.q != B.ctx.q:
        raise ModulusMismatch(f"Moduli differ: {A.ctx.q} vs {B.ctx.q}")


def _counts_by_pairs(A: Subset2D, B: Subset2D, form: Form) -> NDArray[np.int64]:
    q = A.ctx.q
    counts = np.zeros(q, dtype=np.int64)
    if A.size == 0 or B.size == 0:
        return counts
    ax, ay = A.coordinates()
    bx, by = B.coordinates()
    rows = max(1, _PAIR_CHUNK // len(bx))
    for start in range(0, len(ax), rows):
        u = np.subtract.outer(ax[start : start + rows], bx) % q
        v = np.subtract.outer(ay[start : start + rows], by) % q
        counts += np.bincount(_apply_form(u, v, q, form).ravel(), minlength=q)
    return counts


def _indicator_2d(S: Subset2D) -> NDArray[np.float64]:
    q = S.ctx.q
    grid = np.zeros((q, q), dtype=np.float64)
    xs, ys = S.coordinates()
    grid[xs, ys] = 1.0
    return grid


def difference_histogram(A: Subset2D, B: Subset2D) -> NDArray[np.int64]:
    """D(u, v) = #{(a, b) in A x B : a - b = (u, v)} as a q x q array"""
    _check_pair(A, B)
    fa = np.fft.fft2(_indicator_2d(A))
    fb = np.fft.fft2(_indicator_2d(B))
    return np.rint(np.fft.ifft2(fa * np.conj(fb)).real).astype(np.int64)


def _counts_by_fft(A: Subset2D, B: Subset2D, form: Form) -> NDArray[np.int64]:
    q = A.ctx.q
    histogram = difference_histogram(A, B)
    weighted = np.bincount(
        form_table(q, form).ravel(), weights=histogram.ravel().astype(np.float64), minlength=q
    )
    return np.rint(weighted).astype(np.int64)


def crt_components(S: Subset2D) -> Optional[list[Subset2D]]:
    """
    Projections of S onto Z_{p_i^rho_i}^2 when S is their CRT product, else None.

    S always lies in the product of its projections, so it equals it
    exactly when the sizes agree.
    """
    components = [project(S, m) for m in S.ctx.prime_powers]
    if prod(c.size for c in components) != S.size:
        return None
    return components


def crt_lift_2d(components: list[Subset2D], ctx: RingCtx) -> Subset2D:
    """
    CRT product of per-prime-power sets.

    Raises:
        ModulusMismatch: If the component moduli are not the prime-power parts of q
    """
    moduli = ctx.prime_powers
    if tuple(c.ctx.q for c in components) != moduli:
        raise ModulusMismatch(
            f"Components over {[c.ctx.q for c in components]} do not match {list(moduli)}"
        )
    q = ctx.q
    grid = np.arange(q, dtype=np.int64)
    member = np.ones((q, q), dtype=bool)
    for component, m in zip(components, moduli):
        local = _indicator_2d(component).astype(bool)
        member &= local[np.ix_(grid % m, grid % m)]
    return Subset2D(ctx, pack_bits(member.ravel()))


def _counts_by_crt(
    components_a: list[Subset2D], components_b: list[Subset2D], q: int, form: Form
) -> NDArray[np.int64]:
    lam = np.arange(q, dtype=np.int64)
    counts = np.ones(q, dtype=np.int64)
    for ca, cb in zip(components_a, components_b):
        local = _direct_counts(ca, cb, form)
        counts *= local[lam % ca.ctx.q]
    return counts


def _direct_counts(A: Subset2D, B: Subset2D, form: Form) -> NDArray[np.int64]:
    if A.size * B.size <= PAIR_LIMIT:
        return _counts_by_pairs(A, B, form)
    return _counts_by_fft(A, B, form)


def value_counts(
    A: Subset2D, B: Subset2D, form: Form = "product", method: Method = "auto"
) -> tuple[NDArray[np.int64], str]:
    """
    Histogram lam -> number of solutions, for every lam in Z_q.

    Args:
        A, B: Subsets of Z_q^2
        form: 'product' or 'squarediff'
        method: 'auto' picks crt when both sets decompose and q is not a
            prime power, otherwise pairs or fft by size

    Returns:
        (counts, method used)
    """
    _check_pair(A, B)
    q = A.ctx.q
    if method in ("auto", "crt") and A.ctx.omega >= 2:
        components_a = crt_components(A)
        components_b = crt_components(B) if components_a is not None else None
        if components_a is not None and components_b is not None:
            return _counts_by_crt(components_a, components_b, q, form), "crt"
        if method == "crt":
            raise ValueError("Sets are not CRT products; the crt path does not apply")
    elif method == "crt":
        raise ValueError(f"q={q} is a prime power; the crt path does not apply")

    if method == "pairs" or (method in ("auto", "crt") and A.size * B.size <= PAIR_LIMIT):
        return _counts_by_pairs(A, B, form), "pairs"
    return _counts_by_fft(A, B, form), "fft"


def _solution_count(A: Subset2D, B: Subset2D, lam: int, form: Form, method: Method) -> SolutionCount:
    q = A.ctx.q
    lam %= q
    counts, used = value_counts(A, B, form, method)
    logger.debug(f"Counted {form} solutions over Z_{q} via {used}")
    main_term = A.size * B.size * int(form_multiplicities(q, form)[lam]) / (q * q)
    count = int(counts[lam])
    return SolutionCount(
        lam=lam, count=count, main_term=main_term, deviation=abs(count - main_term), method=used
    )


def count_product_solutions(
    A: Subset2D, B: Subset2D, lam: int, method: Method = "auto"
) -> SolutionCount:
    """
    N(lam) = #{a in A, b in B : (a1-b1)(a2-b2) = lam}.

    For unit lam the main term is |A||B| phi(q)/q^2.

    Raises:
        ModulusMismatch
    """
    return _solution_count(A, B, lam, "product", method)


def count_squarediff_solutions(
    A: Subset2D, B: Subset2D, lam: int, method: Method = "auto"
) -> SolutionCount:
    """M(lam) = #{a in A, b in B : (a1-b1)^2 - (a2-b2)^2 = lam}"""
    return _solution_count(A, B, lam, "squarediff", method)


def count_product_solutions_crt(
    A: Subset2D, B: Subset2D, lam: int, form: Form = "product"
) -> int:
    """
    Count through the prime-power components only.

    Raises:
        ValueError: If A or B is not a CRT product
    """
    _check_pair(A, B)
    components_a = crt_components(A)
    components_b = crt_components(B)
    if components_a is None or components_b is None:
        raise ValueError("Sets are not CRT products")
    return int(_counts_by_crt(components_a, components_b, A.ctx.q, form)[lam % A.ctx.q])


def rotate_squarediff(S: Subset2D) -> Subset2D:
    """
    Image of S under (x, y) -> (x + y, x - y).

    Differences transform the same way and (u + v)(u - v) = u^2 - v^2, so
    M_{A,B}(lam) = N_{gA,gB}(lam).

    Raises:
        NotAUnit: For even q, where the map is not a bijection
    """
    q = S.ctx.q
    if q % 2 == 0:
        raise NotAUnit(2, q)
    xs, ys = S.coordinates()
    return Subset2D.from_coordinates(S.ctx, xs + ys, xs - ys)


# ==================== Witnesses ====================


def witness_points(
    A: Subset2D, B: Subset2D, lam: int, form: Form = "product"
) -> Optional[tuple[tuple[int, int], tuple[int, int]]]:
    """Some (a, b) in A x B solving the equation, or None"""
    _check_pair(A, B)
    q = A.ctx.q
    lam %= q
    bx, by = B.coordinates()
    for a1, a2 in A:
        values = _apply_form((a1 - bx) % q, (a2 - by) % q, q, form)
        hits = np.flatnonzero(values == lam)
        if hits.size:
            j = int(hits[0])
            return (a1, a2), (int(bx[j]), int(by[j]))
    return None


def _difference_witness(A: SubsetZq, x: int) -> tuple[int, int]:
    for a in A:
        if (a - x) % A.ctx.q in A:
            return a, (a - x) % A.ctx.q
    raise ValueError(f"{x} is not in A - A")


def witness_pair(A: SubsetZq, B: SubsetZq, lam: int) -> Optional[tuple[int, int, int, int]]:
    """Explicit (a, a', b, b') with (a - a')(b - b') = lam, or None"""
    q = A.ctx.q
    lam %= q
    da = difference_set(A)
    db = difference_set(B)
    for x in da:
        for y in db:
            if x * y % q == lam:
                a, a2 = _difference_witness(A, x)
                b, b2 = _difference_witness(B, y)
                return a, a2, b, b2
    return None


# ==================== Minimal divisors ====================


def product_of_differences(A: SubsetZq, B: SubsetZq) -> SubsetZq:
    """
    (A - A)(B - B); always contains 0.

    Raises:
        ModulusMismatch, EmptySetError
    """
    if A.ctx.q != B.ctx.q:
        raise ModulusMismatch(f"Moduli differ: {A.ctx.q} vs {B.ctx.q}")
    return product_set(difference_set(A), difference_set(B))


def minimal_divisor_d(A: SubsetZq, B: SubsetZq) -> DivisorResult:
    """
    Smallest divisor d of q with d . Z_q inside (A - A)(B - B).

    d = q always qualifies since 0 is in the product.
    """
    certificate = product_of_differences(A, B)
    for d in A.ctx.divisors:
        if not dilate_subgroup_subset_test(d, certificate):
            continue
        if d == 1:
            return DivisorResult(d=d, certificate=certificate)
        # lam = d lam' is reached through a fiber of B whose differences lie in d Z_q
        fiber = fiber_shift_select(B, d)
        inside = product_of_differences(A, fiber)
        return DivisorResult(
            d=d,
            certificate=certificate,
            fiber=fiber,
            fiber_certifies=dilate_subgroup_subset_test(d, inside),
        )
    raise AssertionError("0 missing from (A-A)(B-B)")


def value_set(A: Subset2D, B: Subset2D, form: Form = "product") -> SubsetZq:
    """V = {F(a - b) : a in A, b in B}"""
    counts, _ = value_counts(A, B, form)
    return SubsetZq.from_indicator(A.ctx, counts > 0)


def minimal_divisor_d_2d(
    A: Subset2D, B: Subset2D, mode: Mode = "full", form: Form = "product"
) -> DivisorResult:
    """
    Smallest divisor d with d . Z_q^* (mode 'units') or d . Z_q (mode 'full')
    inside the value set.

    d = None when not even d = q qualifies, i.e. 0 is not a value, as for
    A = (d0 Z_q)^2 and B = (d0 Z_q + 1)^2.

    Raises:
        EmptySetError, ModulusMismatch
    """
    if A.size == 0 or B.size == 0:
        raise EmptySetError("Minimal divisor search needs nonempty sets")
    certificate = value_set(A, B, form)
    for d in A.ctx.divisors:
        if dilate_subgroup_subset_test(d, certificate, units_only=(mode == "units")):
            return DivisorResult(d=d, certificate=certificate)
    return DivisorResult(d=None, certificate=certificate)


# ==================== Fibers ====================


def densest_fiber_shift(B: SubsetZq, q_prime: int) -> tuple[int, int]:
    """(s, |B cap (q' Z_q + s)|) for the densest residue class s mod q', smallest s on ties"""
    counts = fiber_counts(B, q_prime)
    s = int(np.argmax(counts))
    return s, int(counts[s])


def fiber_shift_select(B: SubsetZq, q_prime: int) -> SubsetZq:
    """
    Densest fiber of B modulo q', translated by -s so every element is
    divisible by q'. Its density inside q' Z_q is at least |B|/q.

    Raises:
        NotADivisor, EmptySetError
    """
    if B.size == 0:
        raise EmptySetError("Fiber selection needs a nonempty set")
    s, _ = densest_fiber_shift(B, q_prime)
    members = B.indices()
    fiber = members[members % q_prime == s]
    return SubsetZq.from_indices(B.ctx, fiber - s)


def fiber_view(B: SubsetZq, q_prime: int) -> SubsetZq:
    """The selected fiber rescaled into Z_{q/q'}"""
    if not B.ctx.is_divisor(q_prime):
        raise NotADivisor(q_prime, B.ctx.q)
    selected = fiber_shift_select(B, q_prime)
    return SubsetZq.from_indices(ring_for(B.ctx.q // q_prime), selected.indices() // q_prime)


# ==================== Reports ====================


def vinh_deviation_report(
    A: Subset2D, B: Subset2D, form: Form = "product", instance: Optional[dict] = None
) -> VerificationReport:
    """
    Sweep lam over Z_q for prime q:
        product:    |N(lam) - |A||B|/q| < 4 q^(7/8) sqrt(|A||B|)
        squarediff:  M(lam) - |A||B|/q  < 4 q^(7/8) sqrt(|A||B|)

    Also records whether |A||B| >= 16 q^(15/4), where every lam must be a value.

    Raises:
        NotPrime: For composite q
    """
    _check_pair(A, B)
    q = A.ctx.q
    if not is_prime(q):
        raise NotPrime(f"The deviation bound is stated for prime q, got {q}")
    counts, method = value_counts(A, B, form)
    mass = A.size * B.size
    main_term = mass / q
    signed = counts - main_term
    deviations = np.abs(signed) if form == "product" else signed
    bound = 4 * q ** (7 / 8) * sqrt(mass)
    failing = np.flatnonzero(deviations >= bound)

    threshold_applies = mass >= 16 * q ** (15 / 4)
    all_values_hit = bool(np.all(counts > 0))
    passed = failing.size == 0 and (all_values_hit or not threshold_applies)

    units_mask = np.zeros(q, dtype=bool)
    units_mask[list(units(A.ctx))] = True
    exact_main = mass * form_multiplicities(q, form) / (q * q)
    unit_deviation = float(np.max(np.abs(counts - exact_main)[units_mask])) if units_mask.any() else 0.0

    return VerificationReport(
        suite="vinh",
        instance=instance or {"q": q, "form": form},
        claim="|N(lam) - |A||B|/q| < 4 q^(7/8) sqrt(|A||B|)"
        if form == "product"
        else "M(lam) - |A||B|/q < 4 q^(7/8) sqrt(|A||B|)",
        lhs=float(np.max(deviations)),
        rhs=bound,
        passed=passed,
        witness=[int(lam) for lam in failing[:10]] or None,
        details={
            "form": form,
            "method": method,
            "mass": mass,
            "main_term": main_term,
            "argmax_lam": int(np.argmax(deviations)),
            "max_unit_deviation_exact_main": unit_deviation,
            "threshold_applies": threshold_applies,
            "all_values_hit": all_values_hit,
        },
    )


def fish_bound_report(A: SubsetZq, B: SubsetZq, instance: Optional[dict] = None) -> VerificationReport:
    """
    Informational: log d against C beta^-4 with C = 1, and d against beta^-omega(q),
    with beta the smaller density.
    """
    result = minimal_divisor_d(A, B)
    beta = min(A.density, B.density)
    omega = A.ctx.omega
    log_d = log(result.d)
    exp_exponent = beta ** -4
    return VerificationReport(
        suite="fish1d",
        instance=instance or {"q": A.ctx.q},
        claim="log d <= C beta^-4 (C = 1)",
        lhs=log_d,
        rhs=exp_exponent,
        passed="informational",
        details={
            "d": result.d,
            "beta": beta,
            "within_exp_bound": log_d <= exp_exponent,
            "beta_pow_minus_omega": beta ** -omega,
            "ratio_to_beta_pow_minus_omega": result.d * beta ** omega,
            "product_size": result.certificate.size,
        },
    )
