"""Tests for the Fourier transform, Kloosterman sums and their reports."""
from math import sqrt

import numpy as np
import pytest

from app.core.exceptions import LengthMismatch, ModulusOutOfRange
from app.zq.ring import build_ctx, mobius, units
from app.zq.spectral import (
    fourier_transform,
    kloosterman,
    kloosterman_row,
    kloosterman_symmetry_defect,
    parseval_defect,
    parseval_report,
    ramanujan_sum,
    roots_of_unity,
    weil_bound_report,
)

pytestmark = pytest.mark.unit


class TestFourier:
    def test_delta_transforms_to_constant(self, z7):
        f = np.zeros(7)
        f[0] = 1
        assert np.allclose(fourier_transform(f, z7).values, 1)

    def test_full_indicator(self, z12):
        values = fourier_transform(np.ones(12), z12).values
        assert values[0] == pytest.approx(12)
        assert np.allclose(values[1:], 0, atol=1e-9)

    def test_subgroup_indicator(self):
        ctx = build_ctx(6)
        values = fourier_transform([1, 0, 1, 0, 1, 0], ctx).values
        assert np.allclose(values, [3, 0, 0, 3, 0, 0], atol=1e-9)

    def test_length_checked(self, z7):
        with pytest.raises(LengthMismatch):
            fourier_transform(np.ones(6), z7)

    def test_roots_table_read_only(self, z7):
        roots = roots_of_unity(7)
        assert not roots.flags.writeable
        assert np.allclose(np.abs(roots), 1)

    def test_parseval(self, rng):
        ctx = build_ctx(30)
        f = rng.normal(size=30) + 1j * rng.normal(size=30)
        lhs, rhs = parseval_defect(f, ctx)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_parseval_report(self, z12):
        report = parseval_report(np.arange(12) % 2, z12)
        assert report.passed is True
        assert report.suite == "parseval"


class TestKloosterman:
    def test_known_value(self):
        value = kloosterman(build_ctx(5), 1, 1)
        assert value.real == pytest.approx(0.381966, abs=1e-6)
        assert abs(value.imag) < 1e-12

    @pytest.mark.parametrize("q", [5, 12, 15, 49])
    def test_row_matches_direct_sum(self, q):
        ctx = build_ctx(q)
        for lam in units(ctx)[:4]:
            row = kloosterman_row(ctx, lam)
            direct = [kloosterman(ctx, lam, r) for r in range(q)]
            assert np.allclose(row, direct, atol=1e-9)

    @pytest.mark.parametrize("q", [7, 10, 12, 30, 36])
    def test_ramanujan_sum_at_units(self, q):
        ctx = build_ctx(q)
        for lam in units(ctx):
            assert kloosterman(ctx, lam, 0).real == pytest.approx(mobius(q), abs=1e-9)
        assert ramanujan_sum(ctx, 0) == pytest.approx(ctx.phi)

    @pytest.mark.parametrize("q", [5, 7, 11, 13, 97])
    def test_symmetry(self, q):
        assert kloosterman_symmetry_defect(build_ctx(q)) < 1e-9


class TestWeilReport:
    @pytest.mark.parametrize("q", [5, 7, 15])
    def test_examples_pass(self, q):
        report = weil_bound_report(build_ctx(q))
        assert report.passed is True
        assert report.rhs == pytest.approx(2 * build_ctx(q).tau * sqrt(q))

    def test_prime_stays_below_two_sqrt_q(self):
        report = weil_bound_report(build_ctx(5))
        assert report.lhs < 2 * sqrt(5)

    def test_sweep_to_100(self):
        failures = [q for q in range(2, 101) if weil_bound_report(build_ctx(q)).passed is not True]
        assert failures == []

    def test_modulus_cap(self):
        with pytest.raises(ModulusOutOfRange):
            weil_bound_report(build_ctx(4099))
