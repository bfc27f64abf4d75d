"""Welfare accounting through the direct-mechanism representation.

An equilibrium outcome is summarized by (Q, T): total units sold and total
transfer received per type, both step functions over type bands.  Welfare is

    integral of { 2*theta + S*Q - lam * [ (F/f - S) Q + u_bar - 2 ] } f dtheta

where u_bar is the top type's equilibrium payoff.  The bracketed term is the
government's budget shortfall in envelope form; it is recomputed directly as
the integral of (T - theta*Q) f and the two must agree, which doubles as a
consistency check on the mechanism (the direct form equals the government's
loss on its purchases exactly when private buyers break even).
"""

from __future__ import annotations

from dataclasses import dataclass

from .benchmark import (
    LaissezFaireOutcome,
    MarketPrimitives,
    RegimeOutcome,
    bisect,
    laissez_faire,
    secret_bailout,
)
from .delayed import DelayedEquilibrium
from .dist import TypeDistribution
from .errors import ConsistencyError, DomainError
from .shortlived import ShortLivedEquilibrium

DEFICIT_AGREE_TOL = 1e-8


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    q: int  # units sold by types in the band
    transfer: float  # total transfer received by types in the band


@dataclass(frozen=True)
class GovSegment:
    lo: float
    hi: float
    fraction: float  # share of the band's types accepting the bailout
    pool_mean: float | None = None  # mean of the accepting pool when the
    # share is type-dependent (short-lived composition); None = segment mean


@dataclass(frozen=True)
class DirectMechanism:
    bands: tuple[Band, ...]  # ordered, covering [0, 1], q nonincreasing
    u_bar: float
    gov_set_mass: tuple[GovSegment, ...]

    def q_at(self, theta: float) -> int:
        for b in self.bands:
            if b.lo <= theta <= b.hi:
                return b.q
        return 0

    def transfer_at(self, theta: float) -> float:
        for b in self.bands:
            if b.lo <= theta <= b.hi:
                return b.transfer
        return 0.0


@dataclass(frozen=True)
class WelfareReport:
    welfare: float
    investment_surplus: float
    deficit: float
    volume: float


def _u_bar(p_g: float, S: float, top_trading_type: float) -> float:
    # 2 when the top type stays out; 1 + p_g + S when it trades once in t=2
    if top_trading_type >= 1.0:
        return 1.0 + max(p_g + S, 1.0)
    return 2.0


def mechanism_from(regime, prim: MarketPrimitives) -> DirectMechanism:
    """Direct mechanism (Q, T, u_bar, bailout set) of an equilibrium outcome.

    Accepts LaissezFaireOutcome, RegimeOutcome (secret / full-freeze /
    laissez-faire), ShortLivedEquilibrium, or DelayedEquilibrium.  The
    one-period benchmark has no two-period representation and is rejected.
    """
    S, p_g = prim.S, prim.p_g

    if isinstance(regime, LaissezFaireOutcome):
        t0, p0 = regime.theta0, regime.p0
        bands = _with_cover((Band(0.0, t0, 2, 2.0 * p0),)) if t0 > 0.0 else _with_cover(())
        return DirectMechanism(bands, 2.0, ())

    if isinstance(regime, ShortLivedEquilibrium):
        th, th_g = regime.theta_hat, regime.theta_hat_g
        bands = _with_cover(
            (
                Band(0.0, th, 2, p_g + regime.mean_g),  # = 2*mean_m by arbitrage
                Band(th, th_g, 1, p_g),
            )
        )
        gov = (GovSegment(0.0, th, regime.mu_g, regime.mean_g), GovSegment(th, th_g, 1.0))
        return DirectMechanism(bands, _u_bar(p_g, S, th_g), gov)

    if isinstance(regime, DelayedEquilibrium):
        t0, th_g, t2 = regime.theta_hat, regime.theta_hat_g, regime.theta2
        bands = _with_cover(
            (
                Band(0.0, t0, 2, regime.price_m_t1 + p_g),
                Band(t0, t2, 1, p_g),
            )
        )
        gov = (GovSegment(0.0, t0, regime.mu_g), GovSegment(t0, th_g, 1.0))
        return DirectMechanism(bands, _u_bar(p_g, S, t2), gov)

    if isinstance(regime, RegimeOutcome):
        if regime.regime == "laissez_faire":
            t0, p0 = regime.sell_t1_threshold, regime.price_t1
            bands = _with_cover((Band(0.0, t0, 2, 2.0 * p0),)) if t0 > 0.0 else _with_cover(())
            return DirectMechanism(bands, 2.0, ())
        if regime.regime == "secret":
            t0 = regime.sell_t2_threshold
            t2 = regime.sell_t1_threshold
            p0 = regime.price_t2_recipients
            bands = (
                (Band(0.0, t0, 2, p_g + p0), Band(t0, t2, 1, p_g)) if t0 > 0.0 else (Band(0.0, t2, 1, p_g),)
            )
            return DirectMechanism(_with_cover(bands), _u_bar(p_g, S, t2), (GovSegment(0.0, t2, 1.0),))
        if regime.regime == "full_freeze":
            th_g, t2 = regime.sell_t1_threshold, regime.sell_t2_threshold
            bands = _with_cover((Band(0.0, t2, 1, p_g),))
            return DirectMechanism(bands, _u_bar(p_g, S, t2), (GovSegment(0.0, th_g, 1.0),))
        raise DomainError(f"no two-period mechanism for regime {regime.regime!r}")

    raise DomainError(f"unsupported outcome object {type(regime).__name__}")


def _with_cover(bands: tuple[Band, ...]) -> tuple[Band, ...]:
    """Close the band list with the no-trade remainder up to type 1."""
    hi = bands[-1].hi if bands else 0.0
    if hi < 1.0:
        return bands + (Band(hi, 1.0, 0, 0.0),)
    return bands


def welfare_of(d: TypeDistribution, prim: MarketPrimitives, mech: DirectMechanism) -> WelfareReport:
    """Evaluate the welfare functional band by band.

    The deficit is computed twice: in envelope form u_bar - 2 + sum over
    bands of q * (int F - S * mass), and directly as the integral of
    (T - theta*Q) f.  Disagreement beyond 1e-8 signals a malformed mechanism.
    """
    volume = 0.0
    deficit_env = mech.u_bar - 2.0
    deficit_direct = 0.0
    for b in mech.bands:
        mass = float(d.cdf(b.hi)) - float(d.cdf(b.lo))
        pm = float(d.partial_mean(b.lo, b.hi))
        volume += b.q * mass
        deficit_env += b.q * (d.cdf_integral(b.lo, b.hi) - prim.S * mass)
        deficit_direct += b.transfer * mass - b.q * pm
    if abs(deficit_env - deficit_direct) > DEFICIT_AGREE_TOL:
        raise ConsistencyError(
            f"deficit mismatch: envelope {deficit_env:.3e} vs direct {deficit_direct:.3e}"
        )
    investment = prim.S * volume
    welfare = 2.0 * d.mean() + investment - prim.lam * deficit_env
    return WelfareReport(welfare=welfare, investment_surplus=investment, deficit=deficit_env, volume=volume)


@dataclass(frozen=True)
class MatchedSecret:
    p_g_prime: float
    secret_report: WelfareReport
    sl_report: WelfareReport


def match_volume_secret(
    d: TypeDistribution, prim_sl: MarketPrimitives, sl: ShortLivedEquilibrium
) -> MatchedSecret | None:
    """Secret bailout matching a short-lived equilibrium's total volume.

    Solves F(theta0) + F(min(p'+S, 1)) = F(theta_hat) + F(theta_hat_g) for
    p' < p_g and compares welfare: with lam > 0 the secret bailout must win
    strictly, with lam = 0 exactly tie.  Returns None when no feasible p'
    above max(p0, I) matches the volume.
    """
    lf = laissez_faire(d, prim_sl.S, prim_sl.I)
    target = float(d.cdf(sl.theta_hat)) + float(d.cdf(sl.theta_hat_g))

    def gap(p: float) -> float:
        return float(d.cdf(lf.theta0)) + float(d.cdf(min(p + prim_sl.S, 1.0))) - target

    lo = max(lf.p0, prim_sl.I)
    if gap(lo) >= 0.0 or gap(prim_sl.p_g) <= 0.0:
        return None
    p_prime = bisect(gap, lo, prim_sl.p_g)
    prim_secret = MarketPrimitives(S=prim_sl.S, I=prim_sl.I, lam=prim_sl.lam, p_g=p_prime)
    secret_rep = welfare_of(d, prim_secret, mechanism_from(secret_bailout(d, prim_secret), prim_secret))
    sl_rep = welfare_of(d, prim_sl, mechanism_from(sl, prim_sl))
    if p_prime >= prim_sl.p_g:
        raise ConsistencyError("matched secret price should be below the short-lived p_g")
    if prim_sl.lam > 0.0 and not secret_rep.welfare > sl_rep.welfare:
        raise ConsistencyError("secret bailout should strictly welfare-dominate at matched volume")
    if prim_sl.lam == 0.0 and abs(secret_rep.welfare - sl_rep.welfare) > 1e-9:
        raise ConsistencyError("matched-volume welfare should coincide at lambda = 0")
    return MatchedSecret(p_prime, secret_rep, sl_rep)
