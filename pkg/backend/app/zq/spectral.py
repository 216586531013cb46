"""
Characters of Z_q, the discrete Fourier transform and Kloosterman sums.

Transforms use the convention f^(r) = sum_x f(x) e_q(xr), e_q(x) = exp(2 pi i x / q).
"""
from dataclasses import dataclass, field
from functools import lru_cache
from math import sqrt

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.exceptions import LengthMismatch, ModulusOutOfRange
from ..core.logging import get_logger
from ..core.settings import get_settings
from ..schemas.report import VerificationReport
from .ring import RingCtx, mobius, ring_for, units

logger = get_logger(__name__, component="spectral")

# Largest q for which the Weil sweep is run
WEIL_MAX_Q = 4096
# Largest q for which the full K(lambda, r) symmetry matrix is kept in memory
_SYMMETRY_MAX_Q = 512
# Entries of the exponent table built at once by the direct transform
_DFT_CHUNK = 1 << 22


@lru_cache(maxsize=256)
def roots_of_unity(q: int) -> NDArray[np.complex128]:
    """Read-only table e_q(x) for x in Z_q"""
    table = np.exp(2j * np.pi * np.arange(q) / q)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=256)
def _unit_table(q: int) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """(units, inverses) as aligned read-only arrays"""
    us = np.array(units(ring_for(q)), dtype=np.int64)
    inverses = np.array([pow(int(u), -1, q) if q > 1 else 0 for u in us], dtype=np.int64)
    us.setflags(write=False)
    inverses.setflags(write=False)
    return us, inverses


@dataclass(frozen=True)
class SpectrumZq:
    """
    Fourier coefficients of a function on Z_q.

    Attributes:
        ctx: Ring context
        values: Complex vector, entry r is f^(r)
    """

    ctx: RingCtx = field(repr=False)
    values: NDArray[np.complex128]

    def energy(self) -> float:
        """sum_r |f^(r)|^2"""
        return float(np.sum(np.abs(self.values) ** 2))


def fourier_transform(f: ArrayLike, ctx: RingCtx) -> SpectrumZq:
    """
    Direct O(q^2) transform from the definition.

    Args:
        f: Real or complex vector of length q
        ctx: Ring context

    Raises:
        LengthMismatch: If len(f) != q
    """
    values = np.asarray(f, dtype=np.complex128)
    q = ctx.q
    if values.shape != (q,):
        raise LengthMismatch(f"Expected a vector of length {q}, got shape {values.shape}")
    roots = roots_of_unity(q)
    x = np.arange(q, dtype=np.int64)
    out = np.empty(q, dtype=np.complex128)
    rows = max(1, _DFT_CHUNK // q)
    for start in range(0, q, rows):
        r = x[start : start + rows]
        out[start : start + rows] = roots[np.multiply.outer(r, x) % q] @ values
    return SpectrumZq(ctx, out)


def kloosterman(ctx: RingCtx, lam: int, r: int) -> complex:
    """K_q(lam, r) = sum over units x of e_q(lam / x + r x), by direct summation"""
    q = ctx.q
    us, inverses = _unit_table(q)
    exponents = (lam % q * inverses + r % q * us) % q
    return complex(np.sum(roots_of_unity(q)[exponents]))


def kloosterman_row(ctx: RingCtx, lam: int) -> NDArray[np.complex128]:
    """
    All K_q(lam, r), r in Z_q, as one transform.

    K_q(lam, .) is the transform of g(x) = e_q(lam / x) on units and 0
    elsewhere; the transform uses exp(+2 pi i xr/q), i.e. q * ifft.
    """
    q = ctx.q
    us, inverses = _unit_table(q)
    g = np.zeros(q, dtype=np.complex128)
    g[us] = roots_of_unity(q)[(lam % q * inverses) % q]
    return q * np.fft.ifft(g)


def ramanujan_sum(ctx: RingCtx, r: int) -> float:
    """c_q(r) = K_q(0, r)"""
    return kloosterman(ctx, 0, r).real


def parseval_defect(f: ArrayLike, ctx: RingCtx) -> tuple[float, float]:
    """(sum_r |f^(r)|^2, q * sum_x |f(x)|^2)"""
    values = np.asarray(f, dtype=np.complex128)
    spectrum = fourier_transform(values, ctx)
    return spectrum.energy(), ctx.q * float(np.sum(np.abs(values) ** 2))


def parseval_report(f: ArrayLike, ctx: RingCtx, instance: dict | None = None) -> VerificationReport:
    """Parseval identity for one vector, to relative tolerance"""
    tolerance = get_settings().verify.identity_tolerance
    lhs, rhs = parseval_defect(f, ctx)
    relative = abs(lhs - rhs) / max(rhs, 1.0)
    return VerificationReport(
        suite="parseval",
        instance=instance or {"q": ctx.q},
        claim="sum_r |f^(r)|^2 = q sum_x |f(x)|^2",
        lhs=lhs,
        rhs=rhs,
        passed=relative < tolerance,
        details={"relative_error": relative},
    )


def kloosterman_symmetry_defect(ctx: RingCtx) -> float:
    """max |K_q(lam, r) - K_q(r, lam)| over unit pairs"""
    us, _ = _unit_table(ctx.q)
    matrix = np.array([kloosterman_row(ctx, int(lam))[us] for lam in us])
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.T)))


def weil_bound_report(ctx: RingCtx) -> VerificationReport:
    """
    Sweep K_q(lam, r) over lam in Z_q^*, r in Z_q.

    Checks realness, |K| <= 2 tau(q) sqrt(q) with slack, and
    K_q(lam, 0) = mu(q) for every unit lam.

    Raises:
        ModulusOutOfRange: If q > 4096
    """
    q = ctx.q
    if q > WEIL_MAX_Q:
        raise ModulusOutOfRange(f"Weil sweep supports q <= {WEIL_MAX_Q}, got {q}")
    verify = get_settings().verify
    bound = 2 * ctx.tau * sqrt(q)
    mu = mobius(q)

    max_abs = 0.0
    max_imag = 0.0
    max_ramanujan_error = 0.0
    violators: list[dict] = []
    for lam in units(ctx):
        row = kloosterman_row(ctx, lam)
        magnitudes = np.abs(row)
        max_abs = max(max_abs, float(magnitudes.max()))
        max_imag = max(max_imag, float(np.abs(row.imag).max()))
        max_ramanujan_error = max(max_ramanujan_error, abs(row[0].real - mu))
        for r in np.flatnonzero(magnitudes > bound + verify.inequality_slack)[:10]:
            violators.append({"lam": lam, "r": int(r), "abs": float(magnitudes[r])})

    realness_ok = max_imag < verify.identity_tolerance
    ramanujan_ok = max_ramanujan_error < verify.identity_tolerance
    details = {
        "tau": ctx.tau,
        "max_imag": max_imag,
        "mobius": mu,
        "squarefree": ctx.is_squarefree,
        "max_ramanujan_error": max_ramanujan_error,
        "realness_ok": realness_ok,
        "ramanujan_ok": ramanujan_ok,
    }
    if q <= _SYMMETRY_MAX_Q:
        details["symmetry_defect"] = kloosterman_symmetry_defect(ctx)

    passed = not violators and realness_ok and ramanujan_ok
    logger.debug(f"Weil sweep q={q}: max|K|={max_abs:.6f}, bound={bound:.6f}")
    return VerificationReport(
        suite="weil",
        instance={"q": q},
        claim="|K_q(lam,r)| <= 2 tau(q) sqrt(q)",
        lhs=max_abs,
        rhs=bound,
        passed=passed,
        witness=violators or None,
        details=details,
    )
