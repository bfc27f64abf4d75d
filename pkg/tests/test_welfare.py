import numpy as np
import pytest

from bailoutgame.benchmark import (
    MarketPrimitives,
    full_freeze_delayed,
    laissez_faire,
    one_period_bailout,
    secret_bailout,
)
from bailoutgame.delayed import ds_exists_sufficient, ds_solve
from bailoutgame.errors import ConsistencyError, DomainError
from bailoutgame.shortlived import ShortLivedEquilibrium, sl_solve
from bailoutgame.welfare import match_volume_secret, mechanism_from, welfare_of


def gov_loss(d, prim, mech):
    """Third route to the deficit: the government's loss on its purchases,
    integrated over the bailout-acceptor segments."""
    total = 0.0
    for seg in mech.gov_set_mass:
        mass = float(d.cdf(seg.hi)) - float(d.cdf(seg.lo))
        value = seg.fraction * mass * seg.pool_mean if seg.pool_mean is not None else (
            seg.fraction * float(d.partial_mean(seg.lo, seg.hi)))
        total += seg.fraction * prim.p_g * mass - value
    return total


class TestMechanism:
    def test_laissez_faire_bands(self, u):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.5, p_g=0.5)
        lf = laissez_faire(u, prim.S, prim.I)
        mech = mechanism_from(lf, prim)
        assert [b.q for b in mech.bands] == [2, 0]
        assert mech.bands[0].hi == pytest.approx(2.0 / 3.0, abs=1e-10)
        assert mech.u_bar == 2.0
        rep = welfare_of(u, prim, mech)
        assert rep.deficit == pytest.approx(0.0, abs=1e-9)

    def test_secret_bands(self, u):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.2, p_g=0.5)
        mech = mechanism_from(secret_bailout(u, prim), prim)
        assert [b.q for b in mech.bands] == [2, 1, 0]
        assert mech.bands[0].hi == pytest.approx(2.0 / 3.0, abs=1e-10)
        assert mech.bands[1].hi == pytest.approx(5.0 / 6.0, abs=1e-12)
        assert mech.u_bar == 2.0  # p_g + S < 1

    def test_u_bar_above_cap(self, u):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, p_g=0.9)
        mech = mechanism_from(secret_bailout(u, prim), prim)
        assert mech.u_bar == pytest.approx(1.0 + 0.9 + 1.0 / 3.0, abs=1e-12)

    def test_short_lived_bands(self, u):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.2, p_g=0.5)
        m = sl_solve(u, prim).members[0]
        mech = mechanism_from(m, prim)
        assert [b.q for b in mech.bands] == [2, 1, 0]
        assert mech.bands[0].hi == pytest.approx(m.theta_hat, abs=1e-12)
        assert mech.bands[1].hi == pytest.approx(5.0 / 6.0, abs=1e-12)
        # transfers equalized across the mixed t=1 channels
        assert mech.bands[0].transfer == pytest.approx(2.0 * m.mean_m, abs=1e-9)

    def test_one_period_rejected(self, u):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, p_g=0.5)
        with pytest.raises(DomainError):
            mechanism_from(one_period_bailout(u, prim), prim)


class TestWelfareFunctional:
    def test_secret_at_lambda_zero(self, u):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.0, p_g=0.5)
        rep = welfare_of(u, prim, mechanism_from(secret_bailout(u, prim), prim))
        assert rep.welfare == pytest.approx(1.5, abs=1e-9)
        assert rep.volume == pytest.approx(1.5, abs=1e-9)

    def test_lambda_zero_reduces_to_surplus(self, u):
        # with no fiscal friction, welfare = E[2 theta] + S * volume
        for pg in (0.45, 0.6, 0.9):
            prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.0, p_g=pg)
            rep = welfare_of(u, prim, mechanism_from(secret_bailout(u, prim), prim))
            assert rep.welfare == pytest.approx(2.0 * u.mean() + prim.S * rep.volume, abs=1e-12)

    @pytest.mark.parametrize("pg", [0.45, 0.5, 0.7, 0.9])
    def test_deficit_three_ways(self, u, pg):
        # envelope and direct forms agree inside welfare_of; the government's
        # own loss is a third, independent computation
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.2, p_g=pg)
        outcomes = [secret_bailout(u, prim)]
        sl = sl_solve(u, prim)
        outcomes.extend(sl.members[:1])
        outcomes.extend(ds_solve(u, prim)[:1])
        for out in outcomes:
            mech = mechanism_from(out, prim)
            rep = welfare_of(u, prim, mech)
            assert rep.deficit == pytest.approx(gov_loss(u, prim, mech), abs=1e-8)
            assert rep.deficit >= 0.0

    def test_deficit_nonnegative_full_freeze(self, u):
        prim = MarketPrimitives(S=0.05, I=0.1, lam=0.4, p_g=0.4)
        mech = mechanism_from(full_freeze_delayed(u, prim), prim)
        rep = welfare_of(u, prim, mech)
        assert rep.deficit == pytest.approx(gov_loss(u, prim, mech), abs=1e-8)
        assert rep.deficit > 0.0

    def test_malformed_mechanism_raises(self, u):
        from bailoutgame.welfare import Band, DirectMechanism

        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.2, p_g=0.5)
        bad = DirectMechanism(
            bands=(Band(0.0, 0.5, 2, 10.0), Band(0.5, 1.0, 0, 0.0)), u_bar=2.0, gov_set_mass=()
        )
        with pytest.raises(ConsistencyError):
            welfare_of(u, prim, bad)

    def test_welfare_linear_in_lambda(self, u):
        reps = []
        for lam in (0.0, 0.3, 0.6):
            prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=lam, p_g=0.6)
            reps.append(welfare_of(u, prim, mechanism_from(secret_bailout(u, prim), prim)))
        assert reps[0].deficit == pytest.approx(reps[1].deficit, abs=1e-12)
        slope1 = (reps[1].welfare - reps[0].welfare) / 0.3
        slope2 = (reps[2].welfare - reps[1].welfare) / 0.3
        assert slope1 == pytest.approx(-reps[0].deficit, abs=1e-9)
        assert slope2 == pytest.approx(slope1, abs=1e-9)


class TestDelayedSecretEquivalence:
    @pytest.mark.parametrize("lam", [0.0, 0.2, 0.7])
    def test_identical_welfare(self, u, lam):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=lam, p_g=0.9)
        ds = ds_exists_sufficient(u, prim)
        w_ds = welfare_of(u, prim, mechanism_from(ds, prim))
        w_secret = welfare_of(u, prim, mechanism_from(secret_bailout(u, prim), prim))
        assert w_ds.welfare == pytest.approx(w_secret.welfare, abs=1e-9)
        assert w_ds.deficit == pytest.approx(w_secret.deficit, abs=1e-9)


class TestMatchedVolume:
    def test_uniform_closed_form_price(self, u):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.2, p_g=0.5)
        m = sl_solve(u, prim).members[0]
        res = match_volume_secret(u, prim, m)
        assert res is not None
        theta0 = 2.0 / 3.0
        assert res.p_g_prime == pytest.approx(prim.p_g - (theta0 - m.theta_hat), abs=1e-9)
        assert res.p_g_prime < prim.p_g

    def test_lambda_zero_ties(self, u):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.0, p_g=0.5)
        m = sl_solve(u, prim).members[-1]
        res = match_volume_secret(u, prim, m)
        assert abs(res.secret_report.welfare - res.sl_report.welfare) <= 1e-9

    @pytest.mark.parametrize("pg", [0.45, 0.5, 0.65])
    def test_strict_dominance_with_friction(self, u, pg):
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.2, p_g=pg)
        for m in sl_solve(u, prim).members[::4]:
            res = match_volume_secret(u, prim, m)
            assert res.secret_report.welfare > res.sl_report.welfare
            assert res.secret_report.volume == pytest.approx(res.sl_report.volume, abs=1e-9)

    def test_infeasible_match_reported(self, u):
        # a fabricated tiny-volume outcome cannot be matched above max(p0, I)
        prim = MarketPrimitives(S=1.0 / 3.0, I=0.1, lam=0.2, p_g=0.5)
        fake = ShortLivedEquilibrium(
            theta_hat=0.01, theta_hat_g=0.02, mu_g=0.5, mean_g=0.005, mean_m=0.0075, stigma=0.0025
        )
        assert match_volume_secret(u, prim, fake) is None
