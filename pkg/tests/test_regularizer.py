"""Tests for the fiber regularization descent."""
from math import log

import numpy as np
import pytest

from app.core.exceptions import EmptySetError
from app.zq.regularizer import chain_length_bound, regularize, verify_regularity
from app.zq.ring import build_ctx
from app.zq.sets import Subset2D, SubsetZq, fiber_counts

pytestmark = pytest.mark.unit


def random_set(q: int, density: float, rng) -> SubsetZq:
    size = max(1, round(density * q))
    return SubsetZq.from_indices(build_ctx(q), rng.choice(q, size=size, replace=False))


class TestExamples:
    def test_full_set_is_regular(self, z12):
        A = SubsetZq.full(z12)
        result = regularize(A, 0.5, 2)
        assert result.a_star == A
        assert result.q_star == 12
        assert result.chain == ()

    def test_single_fiber_descends(self, make_set):
        A = make_set(12, [0, 3, 6, 9])
        result = regularize(A, 0.25, 3)
        assert [(step.q_j, step.xi) for step in result.chain] == [(3, (0,))]
        assert result.q_star == 4
        assert result.a_star == A
        assert result.a_star_normalized.is_full()

    def test_shifted_fiber(self, make_set):
        A = make_set(12, [1, 4, 7, 10])
        result = regularize(A, 0.25, 3)
        assert result.chain[0].xi == (1,)
        assert result.shift == (1,)
        assert result.a_star == A

    def test_large_set_untouched(self, make_set):
        # every fiber count is at most |A| / d^(1-eps) already
        A = make_set(6, [0, 1, 2, 3, 4])
        result = regularize(A, 0.5, 2)
        assert result.q_star == 6
        assert result.a_star == A


class TestValidation:
    def test_empty(self, z12):
        with pytest.raises(EmptySetError):
            regularize(SubsetZq.empty(z12), 0.5, 2)

    @pytest.mark.parametrize("epsilon,M", [(0.0, 2), (1.0, 2), (0.5, 1.5)])
    def test_parameters(self, make_set, epsilon, M):
        with pytest.raises(ValueError):
            regularize(make_set(12, [1]), epsilon, M)

    def test_chain_length_bound(self):
        assert chain_length_bound(0.1, 0.5, 2) == int(np.ceil(log(10) / (0.5 * log(2))))
        assert chain_length_bound(1.0, 0.5, 2) == 0


class TestRandomOracle:
    @pytest.mark.parametrize("q", [12, 24, 36, 360])
    @pytest.mark.parametrize("density", [0.1, 0.3])
    @pytest.mark.parametrize("epsilon", [0.25, 0.5])
    @pytest.mark.parametrize("M", [2, 3, 5])
    def test_sampled(self, q, density, epsilon, M, rng):
        for _ in range(10):
            A = random_set(q, density, rng)
            result = regularize(A, epsilon, M)
            assert verify_regularity(result, original=A)
            assert len(result.chain) <= chain_length_bound(A.density, epsilon, M)
            ceiling = A.density ** (-1 / epsilon)
            assert all(M <= step.q_j <= ceiling + 1e-9 for step in result.chain)
            assert result.q_star * np.prod([s.q_j for s in result.chain], dtype=np.int64) == q

    def test_normalized_fibers_bounded(self, rng):
        ctx = build_ctx(360)
        A = random_set(360, 0.1, rng)
        result = regularize(A, 0.5, 2)
        normalized = result.a_star_normalized
        for d in build_ctx(result.q_star).divisors if result.q_star > 1 else ():
            if d >= 2:
                worst = fiber_counts(normalized, d).max()
                assert worst * d**0.5 <= normalized.size * (1 + 1e-9)
        assert ctx.q % result.q_star == 0

    def test_two_dimensional(self, rng):
        ctx = build_ctx(12)
        flat = rng.choice(144, size=20, replace=False)
        A = Subset2D.from_coordinates(ctx, flat // 12, flat % 12)
        result = regularize(A, 0.5, 2)
        assert isinstance(result.a_star, Subset2D)
        assert verify_regularity(result, original=A)

    def test_tampered_result_rejected(self, make_set):
        A = make_set(12, [0, 3, 6, 9])
        result = regularize(A, 0.25, 3)
        assert not verify_regularity(result, original=make_set(12, [0, 3]))

    @pytest.mark.slow
    @pytest.mark.parametrize("q", [12, 24, 36, 360])
    def test_full_sweep(self, q):
        rng = np.random.default_rng(q)
        for density in (0.1, 0.3):
            for epsilon in (0.25, 0.5):
                for M in (2, 3, 5):
                    for _ in range(1000):
                        A = random_set(q, density, rng)
                        result = regularize(A, epsilon, M)
                        assert verify_regularity(result, original=A)
                        assert len(result.chain) <= chain_length_bound(A.density, epsilon, M)
