"""
Arithmetic context for the residue ring Z_q.

Factorization is by trial division; every derived quantity (divisors, totient,
least prime factor) is computed once per modulus and cached.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt, prod

from ..core.exceptions import ModulusOutOfRange, NotAUnit, NotPrime, LengthMismatch
from ..core.settings import get_settings


@dataclass(frozen=True)
class RingCtx:
    """
    Immutable arithmetic context for one modulus q.

    Attributes:
        q: Modulus
        factors: (prime, exponent) pairs, primes strictly increasing
        divisors: All divisors of q in ascending order
        phi: Euler totient
        tau: Number of divisors
        omega: Number of distinct primes
        least_prime: Smallest prime factor (q itself for q = 1)
    """

    q: int
    factors: tuple[tuple[int, int], ...]
    divisors: tuple[int, ...] = field(repr=False)
    phi: int
    tau: int
    omega: int
    least_prime: int

    @property
    def prime_powers(self) -> tuple[int, ...]:
        """The coprime parts p_i^rho_i"""
        return tuple(p**e for p, e in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def full_mask(self) -> int:
        return (1 << self.q) - 1

    def is_divisor(self, d: int) -> bool:
        return d >= 1 and self.q % d == 0


def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Trial-division factorization of n >= 1"""
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return tuple(factors)


def _divisors_from(factors: tuple[tuple[int, int], ...]) -> tuple[int, ...]:
    divisors = [1]
    for p, e in factors:
        divisors = [d * p**k for d in divisors for k in range(e + 1)]
    return tuple(sorted(divisors))


@lru_cache(maxsize=4096)
def ring_for(q: int) -> RingCtx:
    """
    Cached context for any q >= 1.

    Projections and fiber views need the trivial ring Z_1 as well as
    quotients Z_{q*}; build_ctx keeps the public 2..max_modulus contract.
    """
    if q < 1:
        raise ModulusOutOfRange(f"Modulus must be positive, got {q}")
    factors = factorize(q)
    divisors = _divisors_from(factors)
    phi = q
    for p, _ in factors:
        phi = phi // p * (p - 1)
    return RingCtx(
        q=q,
        factors=factors,
        divisors=divisors,
        phi=phi,
        tau=prod(e + 1 for _, e in factors),
        omega=len(factors),
        least_prime=factors[0][0] if factors else 1,
    )


def build_ctx(q: int) -> RingCtx:
    """
    Build the arithmetic context of Z_q.

    Raises:
        ModulusOutOfRange: If q is outside 2..max_modulus
    """
    max_modulus = get_settings().max_modulus
    if not isinstance(q, int) or not 2 <= q <= max_modulus:
        raise ModulusOutOfRange(f"Modulus must lie in 2..{max_modulus}, got {q}")
    return ring_for(q)


def is_prime(n: int) -> bool:
    """Deterministic primality by trial division"""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % p for p in range(3, isqrt(n) + 1, 2))


def mobius(n: int) -> int:
    """Mobius function mu(n)"""
    factors = ring_for(n).factors
    if any(e > 1 for _, e in factors):
        return 0
    return -1 if len(factors) % 2 else 1


def is_unit(x: int, ctx: RingCtx) -> bool:
    return gcd(x % ctx.q, ctx.q) == 1


@lru_cache(maxsize=256)
def _units(q: int) -> tuple[int, ...]:
    return tuple(x for x in range(q) if gcd(x, q) == 1)


def units(ctx: RingCtx) -> tuple[int, ...]:
    """Sorted units of Z_q (for q = 1 the single residue 0)"""
    return _units(ctx.q)


def mod_inverse(x: int, ctx: RingCtx) -> int:
    """
    Inverse of x modulo q.

    Raises:
        NotAUnit: If gcd(x, q) > 1
    """
    x %= ctx.q
    if gcd(x, ctx.q) != 1:
        raise NotAUnit(x, ctx.q)
    return pow(x, -1, ctx.q) if ctx.q > 1 else 0


def crt_split(x: int, ctx: RingCtx) -> tuple[int, ...]:
    """Residues of x modulo each prime power p_i^rho_i"""
    return tuple((x % ctx.q) % m for m in ctx.prime_powers)


def crt_combine(residues: tuple[int, ...] | list[int], ctx: RingCtx) -> int:
    """
    Inverse of crt_split.

    Raises:
        LengthMismatch: If the number of residues differs from omega(q)
    """
    moduli = ctx.prime_powers
    if len(residues) != len(moduli):
        raise LengthMismatch(
            f"Expected {len(moduli)} residues for q={ctx.q}, got {len(residues)}"
        )
    x = 0
    for r, m in zip(residues, moduli):
        rest = ctx.q // m
        x += (r % m) * rest * pow(rest, -1, m) if m > 1 else 0
    return x % ctx.q


def legendre_symbol(a: int, p: int) -> int:
    """
    Legendre symbol (a/p) via Euler's criterion.

    Raises:
        NotPrime: If p is not an odd prime
    """
    if p == 2 or not is_prime(p):
        raise NotPrime(f"Legendre symbol needs an odd prime, got {p}")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def compute_Q1(ctx: RingCtx, M: float) -> int:
    """
    Largest divisor of q whose prime-power parts are each at most M.

    For every p_j | q the exponent gamma_j is maximal with p_j^gamma_j <= M
    and gamma_j <= rho_j.

    Raises:
        ValueError: If M < 2
    """
    if M < 2:
        raise ValueError(f"M must be at least 2, got {M}")
    Q1 = 1
    for p, e in ctx.factors:
        gamma = 0
        while gamma < e and p ** (gamma + 1) <= M:
            gamma += 1
        Q1 *= p**gamma
    return Q1
