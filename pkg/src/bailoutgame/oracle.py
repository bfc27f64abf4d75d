"""Discretized-game verifier: exhaustive best-response checks on a type grid.

This module is the brute-force ground truth against which the analytic
solvers are tested.  It knows nothing about cutoff systems: a candidate is a
per-type strategy profile plus posted prices, and the checks are (a) every
grid firm plays a best response among all pure two-period plans, (b) every
posted price breaks even against the Bayes-pooled mean of the types actually
trading at it, and (c) no buyer gains by a one-shot deviation price offered
to its audience, holding all other prices fixed.

Payoff convention: a sold unit yields price + S when the price funds the
project (price >= I) and just the price otherwise; a kept unit yields theta.
Indifferent firms accept an offer (ties break toward trade).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .benchmark import LaissezFaireOutcome, MarketPrimitives, RegimeOutcome
from .delayed import DelayedEquilibrium
from .dist import TypeDistribution
from .errors import DomainError
from .shortlived import ShortLivedEquilibrium

DEV_GRID_N = 512


@dataclass(frozen=True)
class TypeGrid:
    types: np.ndarray  # cell representative types, strictly increasing
    weights: np.ndarray  # probability masses, sum to 1

    @property
    def n(self) -> int:
        return len(self.types)


def discretize(d: TypeDistribution, n: int, scheme: str = "equal-width") -> TypeGrid:
    """Midpoint discretization of F into n cells (equal-width or equal-mass)."""
    if n < 2:
        raise DomainError("need at least 2 grid cells")
    if scheme == "equal-width":
        edges = np.linspace(0.0, 1.0, n + 1)
    elif scheme == "equal-mass":
        edges = d.quantile(np.linspace(0.0, 1.0, n + 1))
        edges[0], edges[-1] = 0.0, 1.0
    else:
        raise DomainError(f"unknown discretization scheme {scheme!r}")
    mids = 0.5 * (edges[:-1] + edges[1:])
    w = np.diff(np.asarray(d.cdf(edges), dtype=float))
    w = np.maximum(w, 0.0)
    total = w.sum()
    if total <= 0.0:
        raise DomainError("distribution has no mass on [0, 1]")
    return TypeGrid(types=mids, weights=w / total)


@dataclass(frozen=True)
class OraclePrices:
    p_g: float | None  # government offer; None in laissez-faire
    p_m: float  # t=1 market price
    p2_g: float  # t=2 price offered to bailout recipients
    p2_m: float  # t=2 price offered to non-recipients


@dataclass(frozen=True)
class StrategyProfile:
    """Per-cell strategy: t=1 mixing over {gov, market, hold} and a pure t=2
    sell/hold decision for each own t=1 history."""

    gov_prob: np.ndarray
    market_prob: np.ndarray
    sell2_after_gov: np.ndarray
    sell2_after_market: np.ndarray
    sell2_after_hold: np.ndarray
    secret: bool = False  # t=2 buyers cannot condition on bailout acceptance

    def __post_init__(self):
        for name in ("gov_prob", "market_prob"):
            arr = getattr(self, name)
            if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
                raise DomainError(f"{name} must lie in [0, 1]")
        if np.any(self.gov_prob + self.market_prob > 1.0 + 1e-9):
            raise DomainError("t=1 action probabilities exceed 1")

    @property
    def hold_prob(self) -> np.ndarray:
        return np.clip(1.0 - self.gov_prob - self.market_prob, 0.0, 1.0)


@dataclass(frozen=True)
class ViolationReport:
    worst_firm_gain: float
    worst_buyer_gain: float
    buyer_breakeven_residual: float
    details: tuple[tuple[str, str, float], ...] = field(default_factory=tuple)

    def passes(self, bound: float) -> bool:
        return (
            self.worst_firm_gain <= bound
            and self.worst_buyer_gain <= bound
            and self.buyer_breakeven_residual <= bound
        )


def _sale_payoff(price: float, S: float, I: float) -> float:
    return price + (S if price >= I else 0.0)


def _plan_payoffs(grid: TypeGrid, prices: OraclePrices, prim: MarketPrimitives):
    """Payoff of every pure plan: dict (t1, sell2) -> array over types."""
    th = grid.types
    S, I = prim.S, prim.I
    p2_for = {"gov": prices.p2_g, "market": prices.p2_m, "hold": prices.p2_m}
    t1_value = {"market": _sale_payoff(prices.p_m, S, I), "hold": None}
    if prices.p_g is not None:
        t1_value["gov"] = _sale_payoff(prices.p_g, S, I)
    plans = {}
    for t1, v1 in t1_value.items():
        first = np.full_like(th, v1) if v1 is not None else th
        for sell2 in (True, False):
            second = np.full_like(th, _sale_payoff(p2_for[t1], S, I)) if sell2 else th
            plans[(t1, sell2)] = first + second
    return plans


def _equilibrium_payoff(grid: TypeGrid, profile: StrategyProfile, plans) -> np.ndarray:
    def branch(t1: str, sell2: np.ndarray) -> np.ndarray:
        return np.where(sell2 > 0.5, plans[(t1, True)], plans[(t1, False)])

    u = profile.market_prob * branch("market", profile.sell2_after_market)
    u = u + profile.hold_prob * branch("hold", profile.sell2_after_hold)
    if ("gov", True) in plans:
        u = u + profile.gov_prob * branch("gov", profile.sell2_after_gov)
    elif np.any(profile.gov_prob > 0.0):
        raise DomainError("profile assigns government sales but no p_g is posted")
    return u


def _pooled(grid: TypeGrid, mass: np.ndarray) -> tuple[float, float]:
    m = float(np.sum(grid.weights * mass))
    if m <= 0.0:
        return 0.0, 0.0
    v = float(np.sum(grid.weights * mass * grid.types))
    return m, v / m


def verify_profile(
    grid: TypeGrid,
    profile: StrategyProfile,
    prices: OraclePrices,
    prim: MarketPrimitives,
    dev_price_grid_n: int = DEV_GRID_N,
) -> ViolationReport:
    """Best-response audit of a profile; all gains should be O(1/n).

    Firm side: max payoff gain over the six pure plans.  Buyer side: break-even
    residuals of every on-path price, and the best deviation profit over a
    price grid per audience (t=2 recipients, t=2 non-recipients, t=1 market),
    where each firm accepts iff the deviation weakly beats its current plan.
    """
    plans = _plan_payoffs(grid, prices, prim)
    u_eq = _equilibrium_payoff(grid, profile, plans)
    v_best = np.maximum.reduce([p for p in plans.values()])
    firm_gap = v_best - u_eq
    worst_firm = float(np.max(firm_gap))
    details: list[tuple[str, str, float]] = []
    k = int(np.argmax(firm_gap))
    best_plan = max(plans, key=lambda key: plans[key][k])
    details.append((f"firm:theta={grid.types[k]:.6f}", f"plan={best_plan[0]},sell2={best_plan[1]}", worst_firm))

    S, I = prim.S, prim.I
    hold_p = profile.hold_prob
    sell_gov2 = profile.gov_prob * (profile.sell2_after_gov > 0.5)
    sell_mkt1 = profile.market_prob
    sell_non2 = profile.market_prob * (profile.sell2_after_market > 0.5) + hold_p * (
        profile.sell2_after_hold > 0.5
    )

    residual = 0.0
    checks = [("t1_market", sell_mkt1, prices.p_m)]
    if profile.secret:
        checks.append(("t2_all", sell_gov2 + sell_non2, prices.p2_m))
    else:
        checks.append(("t2_recipients", sell_gov2, prices.p2_g))
        checks.append(("t2_nonrecipients", sell_non2, prices.p2_m))
    for name, mass, price in checks:
        m, mean = _pooled(grid, mass)
        if m > 1e-12:
            r = abs(price - mean)
            if r > residual:
                residual = r
            details.append((f"breakeven:{name}", f"price={price:.6f},mean={mean:.6f}", r))

    # current t=2 continuation value per firm and t=1 history
    def t2_value(t1: str, sell2: np.ndarray) -> np.ndarray:
        p2 = prices.p2_g if t1 == "gov" else prices.p2_m
        return np.where(sell2 > 0.5, _sale_payoff(p2, S, I), grid.types)

    dev_prices = np.linspace(I, 1.0, dev_price_grid_n)
    worst_buyer = -np.inf
    worst_detail = None

    def scan_audience(name: str, components: list[tuple[np.ndarray, np.ndarray]]):
        """components: (eligible mass per type, current t=2 value per type)."""
        nonlocal worst_buyer, worst_detail
        for p in dev_prices:
            dev_val = _sale_payoff(float(p), S, I)
            mass = np.zeros(grid.n)
            for elig, cur in components:
                mass = mass + elig * (dev_val >= cur - 1e-12)
            m, mean = _pooled(grid, mass)
            if m <= 1e-12:
                continue
            gain = mean - float(p)
            if gain > worst_buyer:
                worst_buyer = gain
                worst_detail = (f"buyer:{name}", f"p'={float(p):.6f}", gain)

    if profile.secret:
        scan_audience(
            "t2_all",
            [
                (profile.gov_prob, t2_value("gov", profile.sell2_after_gov)),
                (profile.market_prob, t2_value("market", profile.sell2_after_market)),
                (hold_p, t2_value("hold", profile.sell2_after_hold)),
            ],
        )
    else:
        scan_audience("t2_recipients", [(profile.gov_prob, t2_value("gov", profile.sell2_after_gov))])
        scan_audience(
            "t2_nonrecipients",
            [
                (profile.market_prob, t2_value("market", profile.sell2_after_market)),
                (hold_p, t2_value("hold", profile.sell2_after_hold)),
            ],
        )

    # t=1 market deviation: acceptors become non-recipients in t=2
    cont_dev = np.maximum(_sale_payoff(prices.p2_m, S, I), grid.types)
    for p in dev_prices:
        accept = _sale_payoff(float(p), S, I) + cont_dev >= v_best - 1e-12
        m, mean = _pooled(grid, accept.astype(float))
        if m <= 1e-12:
            continue
        gain = mean - float(p)
        if gain > worst_buyer:
            worst_buyer = gain
            worst_detail = ("buyer:t1_market", f"p'={float(p):.6f}", gain)

    if worst_detail is not None:
        details.append(worst_detail)
    return ViolationReport(
        worst_firm_gain=worst_firm,
        worst_buyer_gain=float(worst_buyer),
        buyer_breakeven_residual=residual,
        details=tuple(details),
    )


def brute_force_laissez_faire(grid: TypeGrid, S: float, I: float) -> float:
    """Largest grid cutoff whose implied price matches the pooled mean of the
    types below it (within grid tolerance) and funds I; 0 when frozen, 1 when
    even the top type trades."""
    w, th = grid.weights, grid.types
    cum_w = np.cumsum(w)
    cum_v = np.cumsum(w * th)
    means = cum_v / np.maximum(cum_w, 1e-300)
    gaps = th - S - means
    spacing = float(np.max(np.diff(th))) if grid.n > 1 else 1.0
    if gaps[-1] <= 0.0:
        return 1.0 if means[-1] >= I else 0.0
    ok = (np.abs(gaps) <= 2.0 * spacing) & (means >= I)
    idx = np.nonzero(ok)[0]
    if not len(idx):
        return 0.0
    best = idx[np.argmin(np.abs(gaps[idx]))]
    return float(th[best])


# -- profile builders ----------------------------------------------------------


def _snap(x: float, n: int) -> int:
    """Cell count whose upper edge is nearest to x (equal-width grids)."""
    return int(round(min(max(x, 0.0), 1.0) * n))


def profile_laissez_faire(grid: TypeGrid, lf: LaissezFaireOutcome) -> tuple[StrategyProfile, OraclePrices]:
    n = grid.n
    k = _snap(lf.theta0, n)
    below = np.arange(n) < k
    sell = below.astype(float)
    profile = StrategyProfile(
        gov_prob=np.zeros(n),
        market_prob=sell,
        sell2_after_gov=np.zeros(n),
        sell2_after_market=sell.copy(),
        sell2_after_hold=np.zeros(n),
        secret=True,  # no bailout: t=2 buyers see nothing
    )
    return profile, OraclePrices(p_g=None, p_m=lf.p0, p2_g=lf.p0, p2_m=lf.p0)


def profile_secret(
    grid: TypeGrid, out: RegimeOutcome, prim: MarketPrimitives
) -> tuple[StrategyProfile, OraclePrices]:
    if out.regime != "secret":
        raise DomainError("expected a secret-bailout outcome")
    n = grid.n
    k1 = _snap(out.sell_t1_threshold, n)
    k2 = _snap(out.sell_t2_threshold, n)
    t1 = (np.arange(n) < k1).astype(float)
    t2 = (np.arange(n) < k2).astype(float)
    profile = StrategyProfile(
        gov_prob=t1,
        market_prob=np.zeros(n),
        sell2_after_gov=t2,
        sell2_after_market=np.zeros(n),
        sell2_after_hold=t2.copy(),
        secret=True,
    )
    p0 = out.price_t2_recipients
    return profile, OraclePrices(p_g=prim.p_g, p_m=prim.p_g, p2_g=p0, p2_m=p0)


def profile_full_freeze(
    grid: TypeGrid, out: RegimeOutcome, prim: MarketPrimitives
) -> tuple[StrategyProfile, OraclePrices]:
    if out.regime != "full_freeze":
        raise DomainError("expected a full-freeze outcome")
    n = grid.n
    kg = _snap(out.sell_t1_threshold, n)
    k2 = _snap(out.sell_t2_threshold, n)
    idx = np.arange(n)
    gov = (idx < kg).astype(float)
    wait = ((idx >= kg) & (idx < k2)).astype(float)
    profile = StrategyProfile(
        gov_prob=gov,
        market_prob=np.zeros(n),
        sell2_after_gov=np.zeros(n),
        sell2_after_market=np.zeros(n),
        sell2_after_hold=wait,
    )
    # no t=1 market and no t=2 offer to recipients can break even above zero
    return profile, OraclePrices(p_g=prim.p_g, p_m=0.0, p2_g=0.0, p2_m=prim.p_g)


def _two_block_mix(grid: TypeGrid, k: int, target_mass: float, target_value: float) -> np.ndarray:
    """Per-cell government shares on cells [0, k) matching a (mass, value)
    pair exactly: a bottom block at share 1, one fractional cell, and a
    constant tail share."""
    w = grid.weights[:k]
    v = grid.weights[:k] * grid.types[:k]
    total_w, total_v = float(w.sum()), float(v.sum())
    if not (0.0 <= target_mass <= total_w + 1e-12):
        raise DomainError("infeasible government mass")
    for j in range(-1, k - 1):
        w0 = float(w[: j + 1].sum())
        v0 = float(v[: j + 1].sum())
        wc = float(w[j + 1])
        vc = float(v[j + 1])
        wr = total_w - w0 - wc
        vr = total_v - v0 - vc
        det = wc * vr - vc * wr
        if abs(det) < 1e-300:
            continue
        rm = target_mass - w0
        rv = target_value - v0
        frac = (rm * vr - rv * wr) / det
        beta = (wc * rv - vc * rm) / det
        if -1e-9 <= frac <= 1.0 + 1e-9 and -1e-9 <= beta <= 1.0 + 1e-9:
            g = np.zeros(k)
            g[: j + 1] = 1.0
            g[j + 1] = min(max(frac, 0.0), 1.0)
            if j + 2 < k:
                g[j + 2 :] = min(max(beta, 0.0), 1.0)
            return g
    raise DomainError("no two-block composition matches the requested pool mean")


def profile_short_lived(
    grid: TypeGrid, eq: ShortLivedEquilibrium, prim: MarketPrimitives
) -> tuple[StrategyProfile, OraclePrices]:
    n = grid.n
    k_hat = _snap(eq.theta_hat, n)
    k_g = _snap(eq.theta_hat_g, n)
    idx = np.arange(n)
    below = idx < k_hat
    boycott = (idx >= k_hat) & (idx < k_g)

    mass_below = float(grid.weights[:k_hat].sum())
    gov = np.zeros(n)
    gov[:k_hat] = _two_block_mix(grid, k_hat, eq.mu_g * mass_below, eq.mu_g * mass_below * eq.mean_g)
    gov[boycott] = 1.0
    market = np.where(below, 1.0 - gov, 0.0)
    profile = StrategyProfile(
        gov_prob=gov,
        market_prob=market,
        sell2_after_gov=below.astype(float),
        sell2_after_market=below.astype(float),
        sell2_after_hold=np.zeros(n),
    )
    return profile, OraclePrices(p_g=prim.p_g, p_m=eq.mean_m, p2_g=eq.mean_g, p2_m=eq.mean_m)


def profile_delayed(
    grid: TypeGrid, eq: DelayedEquilibrium, prim: MarketPrimitives
) -> tuple[StrategyProfile, OraclePrices]:
    n = grid.n
    k0 = _snap(eq.theta_hat, n)
    kg = _snap(eq.theta_hat_g, n)
    k2 = _snap(eq.theta2, n)
    idx = np.arange(n)
    below = idx < k0
    boycott = (idx >= k0) & (idx < kg)
    wait = (idx >= kg) & (idx < k2)
    gov = np.where(below, eq.mu_g, 0.0) + boycott.astype(float)
    market = np.where(below, 1.0 - eq.mu_g, 0.0)
    profile = StrategyProfile(
        gov_prob=gov,
        market_prob=market,
        sell2_after_gov=below.astype(float),
        sell2_after_market=below.astype(float),
        sell2_after_hold=wait.astype(float),
    )
    return profile, OraclePrices(
        p_g=prim.p_g, p_m=eq.price_m_t1, p2_g=eq.price_recipients_t2, p2_m=eq.price_holdouts_t2
    )
