"""
diffset toolkit - Single Computations
One exact value (with certificate) per call. Rows emitted by the suites
carry set literals; the claim quantities and replay re-evaluate a row
and return the same lhs, rhs and pass.
"""
from typing import Callable, Union

from pydantic import ValidationError

from ..core.exceptions import MalformedLiteral, ModulusOutOfRange, UnknownSuite
from ..core.logging import get_logger
from ..schemas.compute import ComputeRequest, ComputeResult
from ..schemas.report import VerificationReport
from ..zq.covering import (
    bohr_set,
    corollary_2a2a,
    cov_exact,
    fish_via_covering,
    multiplicative_feasible,
    normalize_kind,
    prop_cov_transfer,
)
from ..zq.equations import (
    DivisorResult,
    minimal_divisor_d,
    minimal_divisor_d_2d,
    product_of_differences,
)
from ..zq.group_action import energy_bound_report
from ..zq.literals import format_literal, parse_literal
from ..zq.regularizer import regularize
from ..zq.ring import build_ctx, compute_Q1, legendre_symbol
from ..zq.sets import Subset2D, SubsetZq, difference_set, sumset
from ..zq.spectral import kloosterman
from .suites import CovIntersectSuite, CovmSuite, VinhSuite, get_suite

logger = get_logger(__name__, component="compute")

AnySet = Union[SubsetZq, Subset2D]


def _literal(request: ComputeRequest, name: str) -> AnySet:
    text = getattr(request, name)
    if text is None:
        raise MalformedLiteral(f"--{name} is required")
    return parse_literal(text, request.q)


def _one_dim(request: ComputeRequest, name: str) -> SubsetZq:
    S = _literal(request, name)
    if not isinstance(S, SubsetZq):
        raise MalformedLiteral(f"--{name} must be a subset of Z_q")
    return S


def _two_dim(request: ComputeRequest, name: str) -> Subset2D:
    S = _literal(request, name)
    if not isinstance(S, Subset2D):
        raise MalformedLiteral(f"--{name} must be a subset of Z_q^2")
    return S


def _modulus(request: ComputeRequest) -> int:
    if request.q is None:
        raise ModulusOutOfRange("--q is required")
    return request.q


def _fiber_details(result: DivisorResult, **details: object) -> dict:
    if result.fiber is not None:
        details.update(fiber=format_literal(result.fiber), fiber_certifies=result.fiber_certifies)
    return details


def _from_report(quantity: str, report: VerificationReport, **details: object) -> ComputeResult:
    return ComputeResult(
        quantity=quantity,
        instance=report.instance,
        value=report.lhs,
        witness=report.witness,
        details={**report.details, **details},
        claim=report.claim,
        rhs=report.rhs,
        passed=report.passed,
    )


# ==================== Quantities ====================


def compute_diffset(request: ComputeRequest) -> ComputeResult:
    A = _one_dim(request, "A")
    D = difference_set(A)
    return ComputeResult(
        quantity="diffset",
        instance={"q": A.ctx.q, "A": format_literal(A)},
        value=format_literal(D),
        details={"size": D.size},
    )


def compute_sumset(request: ComputeRequest) -> ComputeResult:
    A, B = _one_dim(request, "A"), _one_dim(request, "B")
    total = sumset(A, B)
    return ComputeResult(
        quantity="sumset",
        instance={"q": A.ctx.q, "A": format_literal(A), "B": format_literal(B)},
        value=format_literal(total),
        details={"size": total.size},
    )


def compute_product_of_differences(request: ComputeRequest) -> ComputeResult:
    A, B = _one_dim(request, "A"), _one_dim(request, "B")
    product = product_of_differences(A, B)
    return ComputeResult(
        quantity="product_of_differences",
        instance={"q": A.ctx.q, "A": format_literal(A), "B": format_literal(B)},
        value=format_literal(product),
        details={"size": product.size},
    )


def compute_minimal_d(request: ComputeRequest) -> ComputeResult:
    """One-dimensional (A-A)(B-B) or, for pair literals, the value set of the chosen form"""
    A, B = _literal(request, "A"), _literal(request, "B")
    instance = {"q": A.ctx.q, "A": format_literal(A), "B": format_literal(B)}
    if isinstance(A, Subset2D) and isinstance(B, Subset2D):
        result = minimal_divisor_d_2d(A, B, request.mode, request.form)
        instance.update(mode=request.mode, form=request.form)
    elif isinstance(A, SubsetZq) and isinstance(B, SubsetZq):
        result = minimal_divisor_d(A, B)
    else:
        raise MalformedLiteral("--A and --B must have the same dimension")
    return ComputeResult(
        quantity="minimal_d",
        instance=instance,
        value=result.d,
        witness=format_literal(result.certificate),
        details=_fiber_details(result, divisors=list(A.ctx.divisors)),
    )


def compute_cov(request: ComputeRequest) -> ComputeResult:
    S = _one_dim(request, "S")
    kind = normalize_kind(request.kind)
    k, certificate = cov_exact(S, kind)
    return ComputeResult(
        quantity="cov",
        instance={"q": S.ctx.q, "S": format_literal(S), "kind": kind},
        value=k,
        witness=certificate.to_dict(),
    )


def compute_kloosterman(request: ComputeRequest) -> ComputeResult:
    ctx = build_ctx(_modulus(request))
    value = kloosterman(ctx, request.lam, request.r)
    return ComputeResult(
        quantity="kloosterman",
        instance={"q": ctx.q, "lam": request.lam, "r": request.r},
        value=float(value.real),
        details={"imag": float(value.imag), "weil_bound": 2 * ctx.tau * ctx.q**0.5},
    )


def compute_energy(request: ComputeRequest) -> ComputeResult:
    report = energy_bound_report(_two_dim(request, "A"))
    return _from_report("energy", report, bound=report.rhs)


def compute_bohr(request: ComputeRequest) -> ComputeResult:
    p = _modulus(request)
    if request.epsilon is None:
        raise ValueError("--epsilon is required")
    B = bohr_set(p, request.gamma, request.epsilon)
    details = {"size": B.size}
    witness = None
    if multiplicative_feasible(B):
        k, certificate = cov_exact(B, "multiplicative")
        details["cov_times"] = k
        witness = certificate.to_dict()
    return ComputeResult(
        quantity="bohr",
        instance={"q": p, "gamma": request.gamma, "epsilon": request.epsilon},
        value=format_literal(B),
        witness=witness,
        details=details,
    )


def compute_regularize(request: ComputeRequest) -> ComputeResult:
    A = _literal(request, "A")
    epsilon = request.epsilon if request.epsilon is not None else 0.5
    M = request.M if request.M is not None else 2.0
    result = regularize(A, epsilon, M)
    return ComputeResult(
        quantity="regularize",
        instance={"q": A.ctx.q, "A": format_literal(A), "epsilon": epsilon, "M": M},
        value=result.q_star,
        witness=result.to_dict(),
        details={"chain_length": len(result.chain)},
    )


def compute_fish_via_covering(request: ComputeRequest) -> ComputeResult:
    A, B = _one_dim(request, "A"), _one_dim(request, "B")
    return _from_report("fish_via_covering", fish_via_covering(A, B))


def compute_legendre(request: ComputeRequest) -> ComputeResult:
    p = _modulus(request)
    return ComputeResult(
        quantity="legendre",
        instance={"q": p, "a": request.a},
        value=legendre_symbol(request.a, p),
    )


def compute_q1(request: ComputeRequest) -> ComputeResult:
    ctx = build_ctx(_modulus(request))
    M = request.M if request.M is not None else 2.0
    Q1 = compute_Q1(ctx, M)
    return ComputeResult(
        quantity="q1",
        instance={"q": ctx.q, "M": M},
        value=Q1,
        details={"bound": M**ctx.omega},
    )


# ==================== Claims ====================


def compute_vinh_deviation(request: ComputeRequest) -> ComputeResult:
    """Both value forms against 4 q^(7/8) sqrt(|A||B|), as in the vinh sweep"""
    report = VinhSuite().check(_two_dim(request, "A"), _two_dim(request, "B"))
    return _from_report("vinh_deviation", report)


def compute_cov_certificate(request: ComputeRequest) -> ComputeResult:
    return _from_report("cov_certificate", CovmSuite().check(_one_dim(request, "A")))


def compute_cov_transfer(request: ComputeRequest) -> ComputeResult:
    return _from_report("cov_transfer", prop_cov_transfer(_one_dim(request, "S")))


def compute_cov_2a2a(request: ComputeRequest) -> ComputeResult:
    return _from_report("cov_2a2a", corollary_2a2a(_one_dim(request, "A")))


def compute_cov_intersection(request: ComputeRequest) -> ComputeResult:
    """Sets from --set (repeatable), or --A and --B"""
    texts = request.sets or [text for text in (request.A, request.B) if text is not None]
    if not texts:
        raise MalformedLiteral("--set (or --A and --B) is required")
    sets = []
    for text in texts:
        S = parse_literal(text, request.q)
        if not isinstance(S, SubsetZq):
            raise MalformedLiteral("Intersection covers take subsets of Z_q")
        sets.append(S)
    report = CovIntersectSuite().check(sets, request.seed)
    return _from_report("cov_intersection", report)


def compute_replay(request: ComputeRequest) -> ComputeResult:
    """Recompute a verify row from its own JSON line"""
    if request.row is None:
        raise MalformedLiteral("--row is required")
    try:
        recorded = VerificationReport.model_validate_json(request.row)
    except ValidationError as e:
        raise MalformedLiteral(f"--row is not a verify row: {e.errors()[0]['msg']}") from e
    report = get_suite(recorded.suite).replay(recorded.instance, recorded.seed)
    return _from_report("replay", report, suite=recorded.suite, recorded_pass=recorded.passed)


QUANTITIES: dict[str, Callable[[ComputeRequest], ComputeResult]] = {
    "diffset": compute_diffset,
    "sumset": compute_sumset,
    "product_of_differences": compute_product_of_differences,
    "minimal_d": compute_minimal_d,
    "cov": compute_cov,
    "kloosterman": compute_kloosterman,
    "energy": compute_energy,
    "bohr": compute_bohr,
    "regularize": compute_regularize,
    "fish_via_covering": compute_fish_via_covering,
    "legendre": compute_legendre,
    "q1": compute_q1,
    "vinh_deviation": compute_vinh_deviation,
    "cov_certificate": compute_cov_certificate,
    "cov_transfer": compute_cov_transfer,
    "cov_2a2a": compute_cov_2a2a,
    "cov_intersection": compute_cov_intersection,
    "replay": compute_replay,
}


def compute(quantity: str, request: ComputeRequest) -> ComputeResult:
    """
    Compute one quantity.

    Raises:
        UnknownSuite: If the quantity is not registered
        DiffsetError: On invalid inputs
    """
    try:
        handler = QUANTITIES[quantity]
    except KeyError:
        raise UnknownSuite(
            f"Unknown quantity '{quantity}'; choose from {', '.join(QUANTITIES)}"
        ) from None
    logger.info(f"Computing {quantity}", extra={"quantity": quantity})
    return handler(request)
