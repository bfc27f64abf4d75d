"""Reference regimes: laissez-faire, one-period bailout, secret bailout, and
the delayed outcome of a fully frozen economy.

The laissez-faire marginal type theta0 solves theta0 - S = E[theta | theta <=
theta0] =: p0 (supply meets average benefit).  Log-concavity makes the average
benefit curve cross the supply curve from above, so the interior root is
unique; the corner cases theta0 in {0, 1} are handled before any search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import TypeDistribution, lower_mean, trunc_mean
from .errors import DomainError, NumericError

BISECT_TOL = 1e-12
_SIGN_SCAN_N = 1024


@dataclass(frozen=True)
class MarketPrimitives:
    """Market primitives: surplus S, funding need I, fiscal friction lam
    (deadweight loss per unit of public funds), government price p_g."""

    S: float
    I: float
    lam: float = 0.0
    p_g: float = float("nan")

    def __post_init__(self):
        if not self.S > 0.0:
            raise DomainError(f"S must be positive, got {self.S}")
        if not self.I > 0.0:
            raise DomainError(f"I must be positive, got {self.I}")
        if self.lam < 0.0:
            raise DomainError(f"lambda must be nonnegative, got {self.lam}")


@dataclass(frozen=True)
class LaissezFaireOutcome:
    theta0: float
    p0: float
    frozen: bool


@dataclass(frozen=True)
class RegimeOutcome:
    """Trade pattern of a benchmark regime.

    ``sell_t1_threshold`` / ``sell_t2_threshold`` are the marginal types
    selling in each period.  ``volume_total`` counts units actually traded
    over both periods; in regimes where both period-selling sets are lower
    intervals it equals F(t1 threshold) + F(t2 threshold), while in the
    full-freeze regime the two periods partition [0, theta2] and the volume is
    F(theta2).  ``theta_bar_g_range`` is the feasible interval of government
    pool means in the one-period model (the equilibrium multiplicity leaves it
    an interval, not a point).
    """

    regime: str
    sell_t1_threshold: float
    sell_t2_threshold: float
    price_t1: float
    price_t2_recipients: float | None
    price_t2_holdouts: float | None
    volume_total: float
    theta_bar_g_range: tuple[float, float] | None = None


def bisect(fn, lo: float, hi: float, tol: float = BISECT_TOL, max_iter: int = 200) -> float:
    """Root of a sign-changing fn on [lo, hi] by plain bisection."""
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise NumericError("no sign change on bracket", bracket=(lo, hi, f_lo, f_hi))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0 or hi - lo < tol:
            return mid
        if f_lo * f_mid < 0.0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    raise NumericError("bisection did not converge", bracket=(lo, hi, f_lo, f_hi))


def _supply_gap(d: TypeDistribution, S: float, theta: float) -> float:
    return theta - S - lower_mean(d, theta)


def _assert_single_crossing(d: TypeDistribution, S: float) -> None:
    theta = np.linspace(0.0, 1.0, _SIGN_SCAN_N + 1)
    g = theta - S - np.where(
        d.cdf(theta) > 0.0, d.partial_mean(0.0, theta) / np.maximum(d.cdf(theta), 1e-300), 0.0
    )
    signs = np.sign(g[np.abs(g) > 1e-13])
    changes = int(np.sum(signs[1:] != signs[:-1]))
    if changes > 1:
        raise NumericError(
            f"supply gap changes sign {changes} times; distribution violates single crossing",
            bracket=(0.0, 1.0),
        )


def laissez_faire(d: TypeDistribution, S: float, I: float) -> LaissezFaireOutcome:
    """Solve the no-intervention benchmark.

    Returns theta0 = 1 when S >= 1 - E[theta] (everyone trades), the interior
    fixed point otherwise, and the frozen outcome theta0 = 0 whenever the
    candidate price cannot fund I.
    """
    if S <= 0.0 or I <= 0.0:
        raise DomainError("S and I must be positive")
    mean_all = d.mean()
    if S >= 1.0 - mean_all:
        p0 = mean_all
        if p0 < I:
            return LaissezFaireOutcome(0.0, 0.0, True)
        return LaissezFaireOutcome(1.0, p0, False)
    _assert_single_crossing(d, S)
    theta0 = bisect(lambda t: _supply_gap(d, S, t), 0.0, 1.0)
    # secant polish to machine precision (the gap has slope in (0, 1))
    g = lambda t: _supply_gap(d, S, t)
    t_prev, t_cur = theta0 - 1e-7, theta0
    f_prev, f_cur = g(t_prev), g(t_cur)
    for _ in range(8):
        if f_cur == f_prev:
            break
        t_next = t_cur - f_cur * (t_cur - t_prev) / (f_cur - f_prev)
        if not (0.0 < t_next < 1.0):
            break
        t_prev, f_prev = t_cur, f_cur
        t_cur = t_next
        f_cur = g(t_cur)
        if abs(f_cur) < 1e-15:
            break
    if abs(f_cur) <= abs(g(theta0)):
        theta0 = t_cur
    p0 = lower_mean(d, theta0)
    if p0 < I:
        return LaissezFaireOutcome(0.0, 0.0, True)
    return LaissezFaireOutcome(theta0, p0, False)


def laissez_faire_regime(d: TypeDistribution, S: float, I: float) -> RegimeOutcome:
    """Laissez-faire as a two-period trade pattern (both periods identical)."""
    lf = laissez_faire(d, S, I)
    vol = 2.0 * float(d.cdf(lf.theta0))
    return RegimeOutcome(
        regime="laissez_faire",
        sell_t1_threshold=lf.theta0,
        sell_t2_threshold=lf.theta0,
        price_t1=lf.p0,
        price_t2_recipients=lf.p0,
        price_t2_holdouts=lf.p0,
        volume_total=vol,
    )


def _theta_bar_g_interval(d: TypeDistribution, p_g: float, thr: float) -> tuple[float, float]:
    """Feasible government-pool means in the one-period model.

    The upper end is E[theta | theta <= thr] (everyone to the government);
    the lower end is the bottom-interval split where the market pool breaks
    even exactly at p_g.  When p_g is too high for any active market the
    interval collapses to the upper end.
    """
    mean_pool = trunc_mean(d, 0.0, thr)
    gap = lambda tau: trunc_mean(d, tau, thr) - p_g
    if gap(thr) <= 0.0:
        return (mean_pool, mean_pool)
    tau = bisect(gap, 0.0, thr)
    return (lower_mean(d, tau), mean_pool)


def one_period_bailout(d: TypeDistribution, prim: MarketPrimitives) -> RegimeOutcome:
    """Single-period bailout at p_g: all types below p_g + S sell at p_g."""
    lf = laissez_faire(d, prim.S, prim.I)
    if not prim.p_g > max(lf.p0, prim.I) + 1e-12:
        raise DomainError(f"one-period bailout needs p_g > max(p0, I) = {max(lf.p0, prim.I)}")
    thr = min(prim.p_g + prim.S, 1.0)
    return RegimeOutcome(
        regime="one_period",
        sell_t1_threshold=thr,
        sell_t2_threshold=0.0,
        price_t1=prim.p_g,
        price_t2_recipients=None,
        price_t2_holdouts=None,
        volume_total=float(d.cdf(thr)),
        theta_bar_g_range=_theta_bar_g_interval(d, prim.p_g, thr),
    )


def secret_bailout(d: TypeDistribution, prim: MarketPrimitives) -> RegimeOutcome:
    """Bailout with concealed recipient identities: the two periods decouple.

    t=1 replays the one-period bailout (threshold p_g + S at price p_g); t=2
    reverts to laissez-faire (threshold theta0 at price p0, zero if frozen).
    """
    lf = laissez_faire(d, prim.S, prim.I)
    if not prim.p_g > lf.p0 + 1e-12:
        raise DomainError(f"secret bailout needs p_g > p0 = {lf.p0}")
    if prim.p_g < prim.I:
        raise DomainError("secret bailout needs p_g >= I to fund projects")
    thr1 = min(prim.p_g + prim.S, 1.0)
    return RegimeOutcome(
        regime="secret",
        sell_t1_threshold=thr1,
        sell_t2_threshold=lf.theta0,
        price_t1=prim.p_g,
        price_t2_recipients=lf.p0,
        price_t2_holdouts=lf.p0,
        volume_total=float(d.cdf(thr1)) + float(d.cdf(lf.theta0)),
    )


def full_freeze_delayed(d: TypeDistribution, prim: MarketPrimitives) -> RegimeOutcome:
    """Unique delayed outcome when the market would freeze completely.

    Requires theta0 = 0 and p_g >= I.  The marginal government seller
    theta_hat_g solves E[theta | theta_hat_g <= theta <= p_g + S] = p_g; types
    up to theta_hat_g sell to the government in t=1 only and the band up to
    p_g + S sells in t=2 at p_g, so each trading type sells exactly one unit
    and the total volume is F(min(p_g + S, 1)) -- the same as under secrecy.
    """
    lf = laissez_faire(d, prim.S, prim.I)
    if not lf.frozen:
        raise DomainError(f"economy is not fully frozen (theta0 = {lf.theta0})")
    if prim.p_g < prim.I:
        raise DomainError("full-freeze bailout needs p_g >= I")
    theta2 = min(prim.p_g + prim.S, 1.0)
    gap = lambda x: trunc_mean(d, x, theta2) - prim.p_g
    if gap(0.0) >= 0.0:
        raise NumericError(
            "no interior root for the t=1 government cutoff", bracket=(0.0, theta2, gap(0.0), gap(theta2))
        )
    # monotone in x, but scan anyway and report inconsistent parameterizations
    xs = np.linspace(0.0, theta2, 257)
    vals = np.array([gap(float(x)) for x in xs])
    signs = np.sign(vals[np.abs(vals) > 1e-13])
    if int(np.sum(signs[1:] != signs[:-1])) > 1:
        raise NumericError("multiple candidate cutoffs in the full-freeze regime", bracket=(0.0, theta2))
    theta_hat_g = bisect(gap, 0.0, theta2)
    return RegimeOutcome(
        regime="full_freeze",
        sell_t1_threshold=theta_hat_g,
        sell_t2_threshold=theta2,
        price_t1=prim.p_g,
        price_t2_recipients=None,
        price_t2_holdouts=prim.p_g,
        volume_total=float(d.cdf(theta2)),
    )
