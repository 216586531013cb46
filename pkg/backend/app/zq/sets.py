"""
Dense subsets of Z_q and Z_q x Z_q.

A subset is stored as a Python integer bitmask (bit x set iff x is in the set);
sumsets are unions of rotated masks, dilations and products go through numpy
index arrays. All operations return new values and never mutate their inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Union

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions import (
    EmptySetError,
    ModulusMismatch,
    ModulusOutOfRange,
    NotADivisor,
)
from ..core.settings import get_settings
from .ring import RingCtx, ring_for, units

# Cap on the number of products materialized at once by product_set.
_PRODUCT_CHUNK = 1 << 22


# ==================== Bitmask helpers ====================


def pack_bits(indicator: NDArray[np.bool_]) -> int:
    """Convert a boolean indicator vector to an integer bitmask"""
    packed = np.packbits(np.asarray(indicator, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def unpack_bits(bits: int, n: int) -> NDArray[np.bool_]:
    """Convert an integer bitmask to a boolean indicator vector of length n"""
    nbytes = (n + 7) // 8
    raw = np.frombuffer(bits.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def iter_bits(bits: int) -> Iterator[int]:
    """Indices of set bits in ascending order"""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def rotate(bits: int, shift: int, n: int) -> int:
    """Cyclic left rotation of an n-bit mask: the mask of A + shift"""
    shift %= n
    if shift == 0:
        return bits
    return ((bits << shift) | (bits >> (n - shift))) & ((1 << n) - 1)


def _mask_from_indices(indices: NDArray[np.int64], n: int) -> int:
    indicator = np.zeros(n, dtype=bool)
    indicator[indices] = True
    return pack_bits(indicator)


# ==================== Domain types ====================


@dataclass(frozen=True, slots=True)
class SubsetZq:
    """
    Subset A of Z_q.

    Attributes:
        ctx: Ring context
        bits: Bitmask, bit x set iff x in A
        size: Cached popcount |A|
    """

    ctx: RingCtx = field(repr=False)
    bits: int
    size: int = field(init=False)

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.ctx.q:
            raise ValueError(f"Bitmask has bits outside Z_{self.ctx.q}")
        object.__setattr__(self, "size", self.bits.bit_count())

    # ---- constructors ----

    @classmethod
    def of(cls, ctx: RingCtx, elements: Iterable[int]) -> SubsetZq:
        """Subset from residues; elements are reduced mod q"""
        bits = 0
        for x in elements:
            bits |= 1 << (int(x) % ctx.q)
        return cls(ctx, bits)

    @classmethod
    def from_indices(cls, ctx: RingCtx, indices: NDArray[np.int64]) -> SubsetZq:
        return cls(ctx, _mask_from_indices(np.asarray(indices, dtype=np.int64) % ctx.q, ctx.q))

    @classmethod
    def from_indicator(cls, ctx: RingCtx, indicator: NDArray[np.bool_]) -> SubsetZq:
        if len(indicator) != ctx.q:
            raise ValueError(f"Indicator length {len(indicator)} != q={ctx.q}")
        return cls(ctx, pack_bits(indicator))

    @classmethod
    def full(cls, ctx: RingCtx) -> SubsetZq:
        return cls(ctx, ctx.full_mask)

    @classmethod
    def empty(cls, ctx: RingCtx) -> SubsetZq:
        return cls(ctx, 0)

    # ---- views ----

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def density(self) -> float:
        return self.size / self.ctx.q

    def indicator(self) -> NDArray[np.bool_]:
        return unpack_bits(self.bits, self.ctx.q)

    def indices(self) -> NDArray[np.int64]:
        return np.flatnonzero(self.indicator()).astype(np.int64)

    def elements(self) -> list[int]:
        return list(iter_bits(self.bits))

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, (int, np.integer)):
            return False
        return bool(self.bits >> (int(x) % self.ctx.q) & 1)

    def __repr__(self) -> str:
        return f"SubsetZq(q={self.ctx.q}, {{{','.join(map(str, self))}}})"

    # ---- boolean algebra ----

    def _check(self, other: SubsetZq) -> None:
        if other.ctx.q != self.ctx.q:
            raise ModulusMismatch(f"Moduli differ: {self.ctx.q} vs {other.ctx.q}")

    def __or__(self, other: SubsetZq) -> SubsetZq:
        self._check(other)
        return SubsetZq(self.ctx, self.bits | other.bits)

    def __and__(self, other: SubsetZq) -> SubsetZq:
        self._check(other)
        return SubsetZq(self.ctx, self.bits & other.bits)

    def __sub__(self, other: SubsetZq) -> SubsetZq:
        self._check(other)
        return SubsetZq(self.ctx, self.bits & ~other.bits)

    def complement(self) -> SubsetZq:
        return SubsetZq(self.ctx, self.ctx.full_mask ^ self.bits)

    def issubset(self, other: SubsetZq) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def is_full(self) -> bool:
        return self.bits == self.ctx.full_mask


@dataclass(frozen=True, slots=True)
class Subset2D:
    """
    Subset of Z_q x Z_q; bit q*x + y set iff (x, y) is in the set.

    Attributes:
        ctx: Ring context
        bits: Bitmask of length q^2
        size: Cached popcount
    """

    ctx: RingCtx = field(repr=False)
    bits: int
    size: int = field(init=False)

    def __post_init__(self) -> None:
        limit = get_settings().max_modulus_2d
        if self.ctx.q > limit:
            raise ModulusOutOfRange(f"Two-dimensional sets need q <= {limit}, got {self.ctx.q}")
        if self.bits < 0 or self.bits >> (self.ctx.q * self.ctx.q):
            raise ValueError(f"Bitmask has bits outside Z_{self.ctx.q}^2")
        object.__setattr__(self, "size", self.bits.bit_count())

    @classmethod
    def of(cls, ctx: RingCtx, points: Iterable[tuple[int, int]]) -> Subset2D:
        q = ctx.q
        bits = 0
        for x, y in points:
            bits |= 1 << ((int(x) % q) * q + int(y) % q)
        return cls(ctx, bits)

    @classmethod
    def from_coordinates(
        cls, ctx: RingCtx, xs: NDArray[np.int64], ys: NDArray[np.int64]
    ) -> Subset2D:
        q = ctx.q
        flat = (np.asarray(xs, dtype=np.int64) % q) * q + np.asarray(ys, dtype=np.int64) % q
        return cls(ctx, _mask_from_indices(flat, q * q))

    @classmethod
    def full(cls, ctx: RingCtx) -> Subset2D:
        return cls(ctx, (1 << (ctx.q * ctx.q)) - 1)

    @classmethod
    def cartesian(cls, A: SubsetZq, B: SubsetZq) -> Subset2D:
        """The product set A x B"""
        A._check(B)
        q = A.ctx.q
        bits = 0
        for x in A:
            bits |= B.bits << (q * x)
        return cls(A.ctx, bits)

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def density(self) -> float:
        return self.size / (self.ctx.q * self.ctx.q)

    def coordinates(self) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
        """(xs, ys) arrays of the points in lexicographic order"""
        q = self.ctx.q
        flat = np.flatnonzero(unpack_bits(self.bits, q * q)).astype(np.int64)
        return flat // q, flat % q

    def points(self) -> list[tuple[int, int]]:
        q = self.ctx.q
        return [divmod(i, q) for i in iter_bits(self.bits)]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        q = self.ctx.q
        return (divmod(i, q) for i in iter_bits(self.bits))

    def __len__(self) -> int:
        return self.size

    def __contains__(self, point: object) -> bool:
        if not isinstance(point, tuple) or len(point) != 2:
            return False
        x, y = point
        if not isinstance(x, (int, np.integer)) or not isinstance(y, (int, np.integer)):
            return False
        q = self.ctx.q
        return bool(self.bits >> ((int(x) % q) * q + int(y) % q) & 1)

    def __repr__(self) -> str:
        return f"Subset2D(q={self.ctx.q}, size={self.size})"

    def issubset(self, other: Subset2D) -> bool:
        if other.ctx.q != self.ctx.q:
            raise ModulusMismatch(f"Moduli differ: {self.ctx.q} vs {other.ctx.q}")
        return self.bits & ~other.bits == 0


AnySubset = Union[SubsetZq, Subset2D]


# ==================== Operations ====================


def _require_nonempty(*sets: AnySubset) -> None:
    for s in sets:
        if s.size == 0:
            raise EmptySetError("Operation requires nonempty sets")


def _same_modulus(A: AnySubset, B: AnySubset) -> None:
    if A.ctx.q != B.ctx.q:
        raise ModulusMismatch(f"Moduli differ: {A.ctx.q} vs {B.ctx.q}")


def negate(A: SubsetZq) -> SubsetZq:
    """-A"""
    return SubsetZq.from_indices(A.ctx, -A.indices())


def translate(A: SubsetZq, shift: int) -> SubsetZq:
    """A + shift"""
    return SubsetZq(A.ctx, rotate(A.bits, shift, A.ctx.q))


def sumset(A: SubsetZq, B: SubsetZq) -> SubsetZq:
    """
    A + B, as the union of the rotations of the larger operand by the
    elements of the smaller one.

    Raises:
        ModulusMismatch, EmptySetError
    """
    _same_modulus(A, B)
    _require_nonempty(A, B)
    small, big = (A, B) if A.size <= B.size else (B, A)
    q = A.ctx.q
    full = A.ctx.full_mask
    acc = 0
    for a in small:
        acc |= rotate(big.bits, a, q)
        if acc == full:
            break
    return SubsetZq(A.ctx, acc)


def difference_set(A: SubsetZq) -> SubsetZq:
    """
    A - A; contains 0 and is symmetric.

    Raises:
        EmptySetError
    """
    _require_nonempty(A)
    return sumset(A, negate(A))


def higher_sumset(n: int, A: SubsetZq) -> SubsetZq:
    """nA = A + ... + A (n copies)"""
    if n < 1:
        raise ValueError(f"Number of summands must be positive, got {n}")
    _require_nonempty(A)
    result = A
    for _ in range(n - 1):
        result = sumset(result, A)
    return result


def sum_difference(A: SubsetZq, n: int, m: int) -> SubsetZq:
    """nA - mA, e.g. sum_difference(A, 2, 2) = 2A - 2A"""
    if n < 0 or m < 0 or n + m == 0:
        raise ValueError(f"Need n, m >= 0 with n + m > 0, got n={n}, m={m}")
    if m == 0:
        return higher_sumset(n, A)
    negative = negate(higher_sumset(m, A))
    if n == 0:
        return negative
    return sumset(higher_sumset(n, A), negative)


def dilate(lam: int, A: SubsetZq) -> SubsetZq:
    """lam . A = {lam a : a in A}"""
    lam %= A.ctx.q
    return SubsetZq.from_indices(A.ctx, (lam * A.indices()) % A.ctx.q)


def product_set(A: SubsetZq, B: SubsetZq) -> SubsetZq:
    """
    AB = {ab : a in A, b in B}.

    Raises:
        ModulusMismatch
    """
    _same_modulus(A, B)
    q = A.ctx.q
    if A.size == 0 or B.size == 0:
        return SubsetZq.empty(A.ctx)
    small, big = (A, B) if A.size <= B.size else (B, A)
    multipliers = small.indices()
    targets = big.indices()
    indicator = np.zeros(q, dtype=bool)
    rows = max(1, _PRODUCT_CHUNK // len(targets))
    for start in range(0, len(multipliers), rows):
        block = np.multiply.outer(multipliers[start : start + rows], targets) % q
        indicator[block.ravel()] = True
    return SubsetZq.from_indicator(A.ctx, indicator)


def _check_divisor(ctx: RingCtx, d: int) -> None:
    if not ctx.is_divisor(d):
        raise NotADivisor(d, ctx.q)


def project(A: AnySubset, q_star: int) -> AnySubset:
    """
    Coordinatewise reduction pi_{q*}(A) into Z_{q*} (resp. Z_{q*}^2).

    Raises:
        NotADivisor: If q* does not divide q
    """
    _check_divisor(A.ctx, q_star)
    target = ring_for(q_star)
    if isinstance(A, Subset2D):
        xs, ys = A.coordinates()
        return Subset2D.from_coordinates(target, xs % q_star, ys % q_star)
    return SubsetZq.from_indices(target, A.indices() % q_star)


def fiber_counts(A: SubsetZq, q2: int) -> NDArray[np.int64]:
    """
    eta(xi) = |{a in A : a = xi (mod q2)}| for xi in Z_{q2}.

    Raises:
        NotADivisor
    """
    _check_divisor(A.ctx, q2)
    return np.bincount(A.indices() % q2, minlength=q2).astype(np.int64)


@lru_cache(maxsize=1024)
def subgroup_mask(q: int, d: int, units_only: bool) -> int:
    """Mask of d . Z_q (units_only=False) or d . Z_q^* (units_only=True)"""
    if units_only:
        return _mask_from_indices(np.array([d * u % q for u in units(ring_for(q))]), q)
    return _mask_from_indices(np.arange(0, q, d, dtype=np.int64) % q, q)


def dilate_subgroup_subset_test(d: int, S: SubsetZq, units_only: bool = False) -> bool:
    """
    True iff d . Z_q (or d . Z_q^* when units_only) is contained in S.

    Raises:
        NotADivisor
    """
    _check_divisor(S.ctx, d)
    return subgroup_mask(S.ctx.q, d, units_only) & ~S.bits == 0


def max_gap(S: SubsetZq) -> int:
    """
    Largest cyclic gap between consecutive elements of S.

    Raises:
        EmptySetError
    """
    _require_nonempty(S)
    elements = S.elements()
    gaps = [b - a for a, b in zip(elements, elements[1:])]
    gaps.append(elements[0] + S.ctx.q - elements[-1])
    return max(gaps)
