"""Tests for single computations."""
import pytest

from app.core.exceptions import MalformedLiteral, ModulusOutOfRange, UnknownSuite
from app.schemas.compute import ComputeRequest
from app.schemas.report import VerificationReport
from app.services.compute import QUANTITIES, compute
from app.services.suites import SuiteOptions, get_suite, run_task

pytestmark = pytest.mark.unit


def request(**fields) -> ComputeRequest:
    return ComputeRequest(**fields)


class TestSetQuantities:
    def test_diffset(self):
        result = compute("diffset", request(q=7, A="{0,1,3}"))
        assert result.value == "q=7; {0,1,2,3,4,5,6}"
        assert result.details["size"] == 7

    def test_sumset(self):
        result = compute("sumset", request(A="q=5; {0,1}", B="q=5; {0,2}"))
        assert result.value == "q=5; {0,1,2,3}"

    def test_product_of_differences(self):
        result = compute("product_of_differences", request(q=4, A="{0,2}", B="{0,2}"))
        assert result.value == "q=4; {0}"

    def test_cov_plus(self):
        result = compute("cov", request(q=4, S="{0,1}", kind="plus"))
        assert result.value == 2
        assert result.witness["X"] == "q=4; {0,2}"
        assert result.instance["kind"] == "additive"

    def test_requires_literal(self):
        with pytest.raises(MalformedLiteral):
            compute("diffset", request(q=7))

    def test_dimension_checked(self):
        with pytest.raises(MalformedLiteral):
            compute("energy", request(A="q=5; {1,2}"))
        with pytest.raises(MalformedLiteral):
            compute("minimal_d", request(A="q=5; {1,2}", B="q=5; {(1,2)}"))


class TestNumberQuantities:
    def test_kloosterman_details(self):
        result = compute("kloosterman", request(q=5, lam=1, r=1))
        assert result.value == pytest.approx(0.381966, abs=1e-6)
        assert abs(result.details["imag"]) < 1e-12
        assert result.details["weil_bound"] == pytest.approx(4 * 5**0.5)

    def test_kloosterman_needs_modulus(self):
        with pytest.raises(ModulusOutOfRange):
            compute("kloosterman", request(lam=1, r=1))

    def test_legendre(self):
        assert compute("legendre", request(q=7, a=2)).value == 1
        assert compute("legendre", request(q=7, a=3)).value == -1

    def test_q1(self):
        result = compute("q1", request(q=360, M=5))
        assert result.value == 4 * 3 * 5
        assert result.details["bound"] == 5**3

    def test_energy(self):
        result = compute("energy", request(A="q=5; {(2,3)}"))
        assert result.value == 1
        assert result.details["bound"] == 2 * 5
        assert result.rhs == 2 * 5
        assert result.passed is True
        assert result.claim == "E(G) <= tau(q) q |G|^2"

    def test_bohr_requires_epsilon(self):
        with pytest.raises(ValueError):
            compute("bohr", request(q=7, gamma=[1]))


class TestComposite:
    def test_regularize_defaults(self):
        result = compute("regularize", request(q=12, A="{0,3,6,9}", epsilon=0.25, M=3))
        assert result.value == 4
        assert result.details["chain_length"] == 1
        assert result.witness["chain"][0]["q_j"] == 3

    def test_regularize_default_parameters(self):
        result = compute("regularize", request(q=12, A="{0,1,2,3,4,5,6,7,8,9,10,11}"))
        assert result.instance["epsilon"] == 0.5
        assert result.instance["M"] == 2.0
        assert result.value == 12

    def test_fish_via_covering(self):
        result = compute("fish_via_covering", request(q=13, A="{0,1,2,3,4,5,6}", B="{0,1,2,3,4,5,6}"))
        assert result.value == 1
        assert result.passed is True
        assert "pass" not in result.details

    def test_unknown(self):
        with pytest.raises(UnknownSuite):
            compute("volume", request(q=5))

    def test_registry(self):
        assert {"diffset", "minimal_d", "cov", "kloosterman", "energy", "bohr", "regularize"} <= set(QUANTITIES)


class TestClaims:
    def test_vinh_deviation_single_points(self):
        point = "q=7; {(0,0)}"
        result = compute("vinh_deviation", request(A=point, B=point))
        assert result.value == pytest.approx(6 / 7)
        assert result.rhs == pytest.approx(4 * 7 ** (7 / 8))
        assert result.passed is True
        assert result.details["squarediff_pass"] is True

    def test_cov_certificate(self):
        result = compute("cov_certificate", request(q=13, A="{0,1,2,3}"))
        assert result.rhs == 4
        assert result.passed is True
        assert result.witness["X"] == "q=13; {1,7,9,10}"
        assert result.details["k_star"] == 4

    def test_cov_transfer(self):
        result = compute("cov_transfer", request(q=11, S="{0,1,2,3}"))
        assert result.rhs == 3
        assert result.passed is True

    def test_cov_2a2a(self):
        result = compute("cov_2a2a", request(q=11, A="{0,1,2,3}"))
        assert (result.value, result.rhs) == (1, 2)
        assert result.passed is True

    def test_cov_intersection_from_sets(self):
        interval = "{0,1,2,3,4,5,6}"
        result = compute("cov_intersection", request(q=13, sets=[interval, interval]))
        assert result.value == 1
        assert result.rhs == pytest.approx(169 / 49 + 1)
        assert result.passed is True
        assert result.instance["sets"] == ["q=13; {0,1,2,3,4,5,6}"] * 2

    def test_cov_intersection_from_pair(self):
        by_pair = compute("cov_intersection", request(q=13, A="{0,1,2,3,4,5,6}", B="{0,1,2,3,4,5,6}"))
        assert by_pair.passed is True

    def test_cov_intersection_requires_sets(self):
        with pytest.raises(MalformedLiteral):
            compute("cov_intersection", request(q=13))

    def test_minimal_d_reports_fiber(self):
        result = compute("minimal_d", request(q=9, A="{0,1}", B="{0,1,4}"))
        assert result.value == 3
        assert result.details["fiber"] == "q=9; {0,3}"
        assert result.details["fiber_certifies"] is True


class TestReplay:
    @pytest.mark.parametrize("name", ["fish1d", "vinh", "covm", "covintersect", "energy", "counting"])
    def test_matches_recorded_row(self, name):
        (task,) = get_suite(name).plan(SuiteOptions(qs=(11,), samples=1, seed=4))[-1:]
        recorded = run_task(task)
        result = compute("replay", request(row=recorded.to_json_line()))
        assert result.value == recorded.lhs
        assert result.rhs == recorded.rhs
        assert result.passed == recorded.passed
        assert result.details["suite"] == name
        assert result.details["recorded_pass"] == recorded.passed

    def test_recomputes_rather_than_echoes(self):
        row = VerificationReport(
            suite="weil", instance={"q": 5}, claim="tampered", lhs=0.0, rhs=0.0, passed=False
        )
        result = compute("replay", request(row=row.to_json_line()))
        assert result.passed is True
        assert result.details["recorded_pass"] is False

    @pytest.mark.parametrize("row", [None, "{}", "not json", '{"suite": "volume", "claim": "c"}'])
    def test_rejects_bad_rows(self, row):
        with pytest.raises(MalformedLiteral):
            compute("replay", request(row=row))

    def test_row_without_instance_literal(self):
        row = VerificationReport(suite="covm", instance={"q": 11}, claim="c", passed=True)
        with pytest.raises(MalformedLiteral):
            compute("replay", request(row=row.to_json_line()))
