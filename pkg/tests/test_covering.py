"""Tests for covering numbers, their certificates and the exact cover search."""
from itertools import combinations

import pytest

from app.core.exceptions import (
    EmptySetError,
    InfeasibleCover,
    NotAUnit,
    NotPrime,
    SearchBudgetExceeded,
)
from app.zq.covering import (
    bohr_cover_report,
    bohr_set,
    corollary_2a2a,
    cov_exact,
    fish_via_covering,
    intersection_cover,
    is_sum_free,
    multiplicative_feasible,
    prop_cov_transfer,
    ruzsa_cover,
    schur_interval,
    schur_interval_example,
    schur_symmetric_example,
    syndetic_progression_example,
    theorem_cover_certificate,
    theorem_k_star,
    theorem_precondition,
    verify_cover,
)
from app.zq.ring import build_ctx
from app.zq.setcover import ExactCoverSolver, minimum_cover
from app.zq.sets import SubsetZq, difference_set

pytestmark = pytest.mark.unit


class TestExactCoverSolver:
    # 0b000111, 0b111000 and a four-element decoy greedy picks first
    CANDIDATES = [(0, 0b000111), (1, 0b111000), (2, 0b110110)]

    def test_beats_greedy(self):
        solution = ExactCoverSolver(6, self.CANDIDATES).solve()
        assert solution.labels == (0, 1)
        assert solution.greedy_size == 3

    def test_forced_labels(self):
        candidates = [(0, 0b0011), (1, 0b1100), (2, 0b0110), (3, 0b1001)]
        solution = ExactCoverSolver(4, candidates).solve(forced=(2,))
        assert solution.labels == (2, 3)

    def test_duplicate_masks_keep_first_label(self):
        solution = ExactCoverSolver(2, [(5, 0b11), (7, 0b11)]).solve()
        assert solution.labels == (5,)

    def test_infeasible(self):
        assert minimum_cover(3, [(0, 0b011)]) is None
        with pytest.raises(InfeasibleCover):
            ExactCoverSolver(3, [(0, 0b011)]).solve()

    def test_node_limit(self):
        solver = ExactCoverSolver(4, [(0, 0b0011), (1, 0b1100)], node_limit=0)
        with pytest.raises(SearchBudgetExceeded):
            solver.solve()


class TestCovExact:
    def test_full_set(self, z12):
        size, certificate = cov_exact(SubsetZq.full(z12), "additive")
        assert size == 1
        assert certificate.verified

    def test_single_unit(self, make_set):
        size, certificate = cov_exact(make_set(5, [1]), "times")
        assert size == 5
        assert certificate.x_set.is_full()

    def test_additive_pair(self, make_set):
        size, certificate = cov_exact(make_set(4, [0, 1]), "additive")
        assert size == 2
        assert certificate.x_set.elements() == [0, 2]
        assert certificate.recheck()

    def test_empty(self, z7):
        with pytest.raises(EmptySetError):
            cov_exact(SubsetZq.empty(z7))

    def test_no_unit(self, make_set):
        S = make_set(4, [0, 2])
        assert not multiplicative_feasible(S)
        with pytest.raises(InfeasibleCover):
            cov_exact(S, "multiplicative")

    def test_unknown_kind(self, make_set):
        with pytest.raises(ValueError):
            cov_exact(make_set(4, [1]), "division")

    def test_verify_cover_rejects_empty(self, z7):
        assert not verify_cover("additive", SubsetZq.empty(z7), SubsetZq.full(z7))

    def test_lower_bound_by_size(self, rng):
        ctx = build_ctx(17)
        for _ in range(20):
            S = SubsetZq.from_indices(ctx, rng.choice(17, size=5, replace=False))
            size, certificate = cov_exact(S, "additive")
            assert size * S.size >= 17
            assert certificate.verified

    @pytest.mark.parametrize("kind", ["additive", "multiplicative"])
    def test_no_smaller_cover_exists(self, rng, kind):
        for q in (6, 8, 9, 10, 11, 12):
            ctx = build_ctx(q)
            for _ in range(4):
                size = int(rng.integers(2, q // 2 + 1))
                S = SubsetZq.from_indices(ctx, rng.choice(q, size=size, replace=False))
                if kind == "multiplicative" and not multiplicative_feasible(S):
                    continue
                k, certificate = cov_exact(S, kind)
                assert certificate.size == k
                assert verify_cover(kind, certificate.x_set, S)
                # covers stay covers when X grows, so size k - 1 is the only size to rule out
                smaller = (SubsetZq.of(ctx, X) for X in combinations(range(q), k - 1))
                assert not any(verify_cover(kind, X, S) for X in smaller)

    @pytest.mark.parametrize("kind", ["additive", "multiplicative"])
    def test_superset_needs_no_more_dilates(self, rng, kind):
        for q in (12, 13):
            ctx = build_ctx(q)
            for _ in range(10):
                S = SubsetZq.from_indices(ctx, rng.choice(q, size=3, replace=False))
                T = S | SubsetZq.from_indices(ctx, rng.choice(q, size=3, replace=False))
                if kind == "multiplicative" and not multiplicative_feasible(S):
                    continue
                assert cov_exact(T, kind)[0] <= cov_exact(S, kind)[0]


class TestRuzsa:
    def test_covers_difference_set(self, rng):
        ctx = build_ctx(40)
        for _ in range(20):
            A = SubsetZq.from_indices(ctx, rng.choice(40, size=7, replace=False))
            certificate = ruzsa_cover(A)
            assert certificate.verified
            assert certificate.size * A.size <= 40


class TestTheoremCertificate:
    def test_interval_mod_13(self, make_set):
        A = make_set(13, [0, 1, 2, 3])
        assert theorem_k_star(A) == 4
        theorem = theorem_cover_certificate(A)
        assert theorem.precondition_ok
        assert theorem.certificate.x_set.elements() == [1, 7, 9, 10]
        assert theorem.certificate.verified
        assert theorem.details["fiber_density_ok"]

    def test_precondition_fails_mod_6(self, make_set):
        A = make_set(6, [0, 1, 2])
        assert not theorem_precondition(A.ctx, A.size)
        with pytest.raises(NotAUnit):
            theorem_cover_certificate(A)

    def test_random_prime_instances(self, rng):
        ctx = build_ctx(31)
        for _ in range(20):
            A = SubsetZq.from_indices(ctx, rng.choice(31, size=int(rng.integers(12, 20)), replace=False))
            theorem = theorem_cover_certificate(A)
            assert theorem.precondition_ok
            assert theorem.certificate.verified
            assert theorem.certificate.size <= 31 // A.size + 1


class TestTransfers:
    def test_cov_transfer(self, make_set):
        report = prop_cov_transfer(make_set(11, [0, 1, 2, 3]))
        assert report.rhs == 3
        assert report.passed is True
        assert report.details["constructive_ok"]

    def test_cov_transfer_informational_without_units(self, make_set):
        report = prop_cov_transfer(make_set(12, [0, 1, 2]))
        assert report.details["precondition"] is False
        assert report.passed == "informational"

    def test_corollary_2a2a(self, make_set):
        report = corollary_2a2a(make_set(11, [0, 1, 2, 3]))
        assert report.lhs == 1
        assert report.rhs == 2
        assert report.passed is True


class TestIntersection:
    def test_equal_intervals(self, make_set):
        A = make_set(13, range(7))
        result = intersection_cover([A, A])
        assert result.exhaustive
        assert result.shifted_intersection.size == 7
        assert result.pigeonhole_floor == pytest.approx(49 / 13)
        assert result.bound == pytest.approx(169 / 49 + 1)
        assert result.certificate.verified
        assert result.certificate.size <= result.bound

    def test_shifted_intersection_differences_inside(self, rng):
        ctx = build_ctx(13)
        sets = [SubsetZq.from_indices(ctx, rng.choice(13, size=8, replace=False)) for _ in range(3)]
        result = intersection_cover(sets)
        inner = difference_set(result.shifted_intersection)
        assert all(inner.issubset(difference_set(A)) for A in sets)
        assert result.shifted_intersection.size >= result.pigeonhole_floor

    def test_rejects_empty_input(self, z7):
        with pytest.raises(ValueError):
            intersection_cover([])
        with pytest.raises(EmptySetError):
            intersection_cover([SubsetZq.full(z7), SubsetZq.empty(z7)])


class TestBohr:
    def test_examples(self):
        assert bohr_set(7, [1], 1 / 3).elements() == [0, 1, 2, 5, 6]
        assert bohr_set(7, [1], 1.0).is_full()

    def test_validation(self):
        with pytest.raises(NotPrime):
            bohr_set(8, [1], 0.5)
        with pytest.raises(ValueError):
            bohr_set(7, [], 0.5)
        with pytest.raises(ValueError):
            bohr_set(7, [1], 0.0)

    def test_cover_report(self):
        report = bohr_cover_report(7, [1], 1 / 3)
        assert (report.lhs, report.rhs) == (2, 3)
        assert report.passed is True

    def test_epsilon_not_a_reciprocal(self):
        # B \ {0} = +-{1,2,3} and no x maps it onto +-{4,5,6}, so two dilates fall short
        report = bohr_cover_report(13, [1], 0.3)
        assert report.rhs == 4
        assert report.lhs == 3
        assert report.claim == "cov*(B(Gamma, eps)) <= ceil(1/eps)^|Gamma|"
        assert report.passed is True
        assert report.details["eps_pow"] == pytest.approx(10 / 3)
        assert report.details["within_eps_pow"] is True


class TestSumFree:
    def test_intervals(self):
        assert schur_interval(13).elements() == [5, 6, 7, 8]
        assert schur_interval(7).elements() == [3, 4]

    def test_interval_report(self):
        report = schur_interval_example(13)
        assert report.passed is True
        assert report.details["cov_times"] == report.lhs

    @pytest.mark.parametrize("p", [7, 13, 19])
    def test_cov_times_counts_zero_and_units(self, p):
        # 0 needs its own dilator and every unit dilate hits |S| units
        report = schur_interval_example(p)
        size = report.details["size"]
        assert report.lhs >= 1 + -(-(p - 1) // size)

    def test_symmetric(self):
        report = schur_symmetric_example(13)
        assert report.passed is True
        assert report.instance["variant"] == "symmetric"

    def test_progression(self):
        report = syndetic_progression_example(23, 7)
        assert report.passed is True
        assert report.details["gap"] == 9
        assert report.rhs == 9

    def test_progression_validation(self):
        with pytest.raises(ValueError):
            syndetic_progression_example(23, 3)
        with pytest.raises(ValueError):
            syndetic_progression_example(23, 5)
        with pytest.raises(NotPrime):
            schur_interval_example(9)

    def test_is_sum_free(self, make_set):
        assert is_sum_free(make_set(7, [3, 4]))
        assert not is_sum_free(make_set(7, [1, 2, 3]))


class TestFishViaCovering:
    def test_dense_prime(self, make_set):
        A = make_set(13, range(7))
        report = fish_via_covering(A, A)
        assert report.lhs == 1
        assert report.passed is True
        assert report.details["inclusion"]

    def test_non_unit_dilators(self, make_set):
        A = make_set(6, [0, 1, 2])
        report = fish_via_covering(A, A)
        assert report.passed == "informational"
        assert "error" in report.details
