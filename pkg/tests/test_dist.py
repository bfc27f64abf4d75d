import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bailoutgame.dist import from_density, from_table, lower_mean, trunc_mean, uniform, validate
from bailoutgame.errors import DomainError

from conftest import ref_truncnorm_mean


class TestTruncMean:
    def test_uniform_midpoints(self, u):
        assert trunc_mean(u, 0.2, 0.6) == pytest.approx(0.4, abs=1e-15)
        assert trunc_mean(u, 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)
        assert trunc_mean(u, 0.35, 0.45) == pytest.approx(0.4, abs=1e-12)

    def test_lower_mean(self, u):
        assert lower_mean(u, 2.0 / 3.0) == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert lower_mean(u, 0.0) == 0.0
        assert lower_mean(u, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_degenerate_returns_left_endpoint(self, u):
        assert trunc_mean(u, 0.7, 0.7) == 0.7

    def test_domain_errors(self, u):
        with pytest.raises(DomainError):
            trunc_mean(u, -0.1, 0.5)
        with pytest.raises(DomainError):
            trunc_mean(u, 0.6, 0.5)
        with pytest.raises(DomainError):
            trunc_mean(u, 0.5, 1.2)

    def test_uniform_table_agrees_with_analytic(self, u):
        # piecewise-linear representation of the constant density is exact
        tab = from_table(np.linspace(0.0, 1.0, 33), np.ones(33))
        for a, b in [(0.0, 1.0), (0.1, 0.9), (0.25, 0.3), (0.0, 0.05), (0.37, 1.0)]:
            assert trunc_mean(tab, a, b) == pytest.approx(trunc_mean(u, a, b), abs=1e-12)

    def test_truncnorm_against_closed_form(self, tnorm):
        for a, b in [(0.0, 1.0), (0.2, 0.7), (0.0, 0.5), (0.5, 1.0), (0.45, 0.55)]:
            assert trunc_mean(tnorm, a, b) == pytest.approx(ref_truncnorm_mean(a, b), abs=2e-6)

    @given(
        a=st.floats(0.0, 1.0),
        b=st.floats(0.0, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_bounds_hold(self, a, b):
        a, b = min(a, b), max(a, b)
        m = trunc_mean(uniform(), a, b)
        assert a <= m <= b

    @pytest.mark.parametrize("dist_name", ["u", "tnorm"])
    def test_monotone_in_both_arguments(self, dist_name, u, tnorm):
        d = {"u": u, "tnorm": tnorm}[dist_name]
        grid = np.linspace(0.0, 1.0, 21)
        for b in (0.5, 0.8, 1.0):
            vals = [trunc_mean(d, float(a), b) for a in grid if a < b]
            assert all(x2 >= x1 - 1e-12 for x1, x2 in zip(vals, vals[1:]))
        for a in (0.0, 0.2, 0.5):
            vals = [trunc_mean(d, a, float(b)) for b in grid if b > a]
            assert all(x2 >= x1 - 1e-12 for x1, x2 in zip(vals, vals[1:]))

    @pytest.mark.parametrize("dist_name", ["u", "tnorm"])
    def test_slopes_strictly_inside_unit_interval(self, dist_name, u, tnorm):
        # log-concavity: finite-difference slopes in each argument within (0, 1)
        d = {"u": u, "tnorm": tnorm}[dist_name]
        h = 1e-5
        for a, b in [(0.2, 0.7), (0.4, 0.9), (0.1, 0.5)]:
            da = (trunc_mean(d, a + h, b) - trunc_mean(d, a - h, b)) / (2 * h)
            db = (trunc_mean(d, a, b + h) - trunc_mean(d, a, b - h)) / (2 * h)
            assert 0.0 < da < 1.0
            assert 0.0 < db < 1.0


class TestValidate:
    def test_uniform_passes(self, u):
        report = validate(u, 256)
        assert report.all_pass

    def test_log_convex_density_fails(self):
        bad = from_density(lambda x: math.exp(x * x), 512)
        report = validate(bad, 256)
        assert not report["log_concavity"].passed
        assert report["log_concavity"].worst_value > 0.0

    def test_truncnorm_passes(self, tnorm):
        report = validate(tnorm, 256)
        assert report.all_pass

    def test_narrow_truncnorm_flags_regularity(self):
        # sigma = 0.25 genuinely violates the regularity assumption near a = 0
        narrow = from_density(lambda x: math.exp(-0.5 * ((x - 0.5) / 0.25) ** 2), 2048)
        report = validate(narrow, 256)
        assert not report["regularity"].passed

    def test_grid_floor(self, u):
        with pytest.raises(DomainError):
            validate(u, 8)


class TestTableConstruction:
    def test_rejects_partial_support(self):
        with pytest.raises(DomainError):
            from_table([0.1, 0.5, 1.0], [1.0, 1.0, 1.0])

    def test_rejects_negative_density(self):
        with pytest.raises(DomainError):
            from_table([0.0, 0.5, 1.0], [1.0, -0.2, 1.0])

    def test_normalizes(self):
        d = from_table([0.0, 0.5, 1.0], [3.0, 3.0, 3.0])
        assert d.cdf(1.0) == pytest.approx(1.0, abs=1e-15)
        assert d.mean() == pytest.approx(0.5, abs=1e-12)

    def test_quantile_roundtrip(self, tnorm):
        for q in (0.05, 0.3, 0.5, 0.77, 0.95):
            assert tnorm.cdf(tnorm.quantile(q)) == pytest.approx(q, abs=1e-10)


class TestBoundaryExtension:
    def test_matches_interior(self, u):
        assert u.cdf_extended(0.7) == pytest.approx(0.7, abs=1e-15)
        assert u.partial_mean_extended(0.2, 0.9) == pytest.approx(u.partial_mean(0.2, 0.9), abs=1e-15)

    def test_uniform_extends_linearly(self, u):
        assert u.cdf_extended(1.25) == pytest.approx(1.25, abs=1e-15)
        assert u.partial_mean_extended(0.5, 1.2) == pytest.approx((1.2**2 - 0.25) / 2, abs=1e-12)

    def test_numeric_uses_boundary_density(self, tnorm):
        f1 = tnorm.boundary_density()
        assert tnorm.cdf_extended(1.5) == pytest.approx(1.0 + 0.5 * f1, abs=1e-12)
