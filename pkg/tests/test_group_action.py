"""Tests for the SL_2 matrix family, its action and its energy."""
import pytest

from app.core.exceptions import DenominatorNotUnit
from app.zq.group_action import (
    Mat2,
    action_report,
    energy_bound_report,
    matrices_from_set,
    mobius_apply,
    multiplicative_energy,
    multiplicative_energy_bruteforce,
    solve_ga_eq_b,
)
from app.zq.ring import build_ctx
from app.zq.sets import Subset2D, SubsetZq

pytestmark = pytest.mark.unit


def random_2d(q: int, size: int, rng) -> Subset2D:
    flat = rng.choice(q * q, size=size, replace=False)
    return Subset2D.from_coordinates(build_ctx(q), flat // q, flat % q)


class TestMatrices:
    def test_origin(self, z7):
        (g,) = matrices_from_set(Subset2D.of(z7, [(0, 0)]))
        assert g.entries() == (0, 1, 6, 0)

    def test_entries_mod_5(self):
        (g,) = matrices_from_set(Subset2D.of(build_ctx(5), [(1, 1)]))
        assert g.entries() == (4, 2, 4, 1)
        assert g.det == 1

    def test_inverse(self, rng):
        for g in matrices_from_set(random_2d(12, 20, rng)):
            assert g @ g.inverse() == Mat2.identity(g.ctx)

    def test_empty(self, z7):
        with pytest.raises(ValueError):
            matrices_from_set(Subset2D(z7, 0))


class TestMobius:
    def test_example(self):
        g = Mat2.of(0, 1, -1, 0, build_ctx(5))
        assert mobius_apply(g, 2) == 2

    def test_pole(self):
        g = Mat2.of(0, 1, -1, 0, build_ctx(5))
        with pytest.raises(DenominatorNotUnit):
            mobius_apply(g, 0)

    def test_triple_count_matches_pointwise(self, rng):
        ctx = build_ctx(10)
        G = matrices_from_set(random_2d(10, 8, rng))
        A, B = SubsetZq.of(ctx, [1, 3, 4, 8]), SubsetZq.of(ctx, [0, 2, 5, 7, 9])
        expected = 0
        for g in G:
            for b in B:
                try:
                    expected += mobius_apply(g, b) in A
                except DenominatorNotUnit:
                    pass
        assert solve_ga_eq_b(A, B, G) == expected

    def test_identity_action(self, make_set):
        A = make_set(9, [0, 2, 5, 7])
        assert solve_ga_eq_b(A, A, [Mat2.identity(A.ctx)]) == 4
        assert solve_ga_eq_b(A, SubsetZq.empty(A.ctx), [Mat2.identity(A.ctx)]) == 0


class TestEnergy:
    def test_single_matrix(self, z7):
        assert multiplicative_energy(matrices_from_set(Subset2D.of(z7, [(2, 3)]))) == 1

    def test_full_plane_mod_5(self):
        G = matrices_from_set(Subset2D.full(build_ctx(5)))
        energy = multiplicative_energy(G)
        assert len(G) ** 2 <= energy <= 6250
        assert energy == multiplicative_energy_bruteforce(G)

    def test_fast_matches_oracle(self, rng):
        for q in (6, 9, 11):
            G = matrices_from_set(random_2d(q, 12, rng))
            assert multiplicative_energy(G) == multiplicative_energy_bruteforce(G)

    def test_rejects_non_sl2(self, z7):
        with pytest.raises(ValueError):
            multiplicative_energy([Mat2.of(2, 0, 0, 1, z7)])

    def test_report_odd_modulus(self, rng):
        report = energy_bound_report(random_2d(15, 20, rng))
        assert report.passed is True
        assert report.details["oracle_ok"]

    def test_report_even_modulus(self, rng):
        report = energy_bound_report(random_2d(8, 10, rng))
        assert report.passed == "informational"
        assert report.rhs == build_ctx(8).tau * 8 * 100


class TestActionReport:
    @pytest.mark.parametrize("q", [5, 7, 12])
    def test_triples_equal_solution_count(self, q, rng):
        ctx = build_ctx(q)
        for _ in range(5):
            A2 = random_2d(q, q, rng)
            A = SubsetZq.from_indices(ctx, rng.choice(q, size=q // 2, replace=False))
            B = SubsetZq.from_indices(ctx, rng.choice(q, size=q // 2 + 1, replace=False))
            report = action_report(A2, A, B)
            assert report.passed is True
            assert report.lhs == report.rhs

    def test_units_are_values_recorded(self):
        ctx = build_ctx(7)
        full = SubsetZq.full(ctx)
        report = action_report(Subset2D.full(ctx), full, full)
        assert report.details["units_are_values"] is True
        assert report.lhs == report.rhs
