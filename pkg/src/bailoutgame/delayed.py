"""Delayed stimulation equilibria and equilibrium classification.

Here the marginal both-period seller is exactly theta0, the last trading type
is theta2 = min(p_g + S, 1), and a band of high types (theta_hat_g, theta2]
holds out in t=1 to sell at p_g in t=2.  Prices are pinned: recipients and
t=1 market sellers trade at p0 throughout, holdouts at p_g.  The split
parameter theta_hat_g ranges over an interval; for each value the bailout
share mu_g among low types is pinned by the t=2 buyers' zero-profit condition
on the holdout audience:

    (1 - mu_g) F(theta0) (p_g - p0) = integral of (theta - p_g) f
                                      over (theta_hat_g, theta2].

The gamma function gamma(a) = max{x > a : x - S <= E[theta | a <= theta <= x]}
is the largest pooled-sale cutoff sustainable above a; it drives the
sufficiency construction (mu_g = 1, p_g = E[theta | theta_hat_g..gamma]).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._margins import pooled_margin_fn, sup_margin
from .benchmark import MarketPrimitives, bisect, laissez_faire
from .dist import TypeDistribution, trunc_mean
from .errors import DomainError, NumericError

STRICT_TOL = 1e-7
BREAK_EVEN_TOL = 1e-8
EDGE_MARGIN = 1e-6


@dataclass(frozen=True)
class DelayedEquilibrium:
    theta_hat: float  # = theta0
    theta_hat_g: float
    theta2: float  # = min(p_g + S, 1)
    mu_g: float
    price_m_t1: float  # = p0
    price_recipients_t2: float  # = p0
    price_holdouts_t2: float  # = p_g
    nodev_margin_recipients: float
    nodev_margin_holdouts: float


@dataclass(frozen=True)
class EquilibriumClass:
    tag: str  # "short_lived" | "delayed"
    cutoffs: tuple[float, float, float]


def ds_volume(d: TypeDistribution, eq: DelayedEquilibrium) -> float:
    return float(d.cdf(eq.theta_hat)) + float(d.cdf(eq.theta2))


def gamma(d: TypeDistribution, S: float, a: float) -> float:
    """Largest x in (a, 1] with x - S <= E[theta | a <= theta <= x].

    The gap x -> E[theta | a<=theta<=x] - x + S starts at S > 0 and is
    strictly decreasing under log-concavity, so the root is unique; when the
    constraint is still slack at x = 1 the answer is 1.
    """
    if not (0.0 <= a < 1.0):
        raise DomainError(f"a must lie in [0, 1), got {a}")
    if trunc_mean(d, a, 1.0) >= 1.0 - S:
        return 1.0
    return bisect(lambda x: trunc_mean(d, a, x) - x + S, a, 1.0)


def _mu_from_break_even(d, p_g, p0, theta0, theta_hat_g, theta2) -> float:
    """mu_g pinned by zero profit of t=2 buyers on the holdout audience."""
    band = float(d.partial_mean(theta_hat_g, theta2)) - p_g * (float(d.cdf(theta2)) - float(d.cdf(theta_hat_g)))
    denom = float(d.cdf(theta0)) * (p_g - p0)
    return 1.0 - band / denom


def _holdout_break_even_residual(d, mu_g, p_g, p0, theta0, theta_hat_g, theta2) -> float:
    mass = (1.0 - mu_g) * float(d.cdf(theta0)) + float(d.cdf(theta2)) - float(d.cdf(theta_hat_g))
    value = (1.0 - mu_g) * float(d.cdf(theta0)) * p0 + float(d.partial_mean(theta_hat_g, theta2))
    if mass <= 0.0:
        return 0.0
    return value / mass - p_g


def ds_candidate(
    d: TypeDistribution,
    prim: MarketPrimitives,
    theta_hat_g: float,
    mu_g: float,
    dev_grid_n: int = 512,
    strict_tol: float = STRICT_TOL,
    be_tol: float = BREAK_EVEN_TOL,
) -> DelayedEquilibrium | None:
    """Verify (theta_hat_g, mu_g) as a delayed stimulation equilibrium.

    Three gates: the t=2 holdout-audience price p_g must break even given the
    candidate composition; no offer p' in (p0, p_g] to recipients may profit;
    no offer p' > p_g to non-recipients may profit.  Margins are suprema over
    the open-left price intervals, so the break-even boundary value itself is
    not counted against the candidate.
    """
    lf = laissez_faire(d, prim.S, prim.I)
    if lf.frozen:
        raise DomainError("economy is fully frozen; use benchmark.full_freeze_delayed")
    if not prim.p_g > lf.p0:
        raise DomainError(f"need p_g > p0 = {lf.p0}")
    theta0, p0 = lf.theta0, lf.p0
    theta2 = min(prim.p_g + prim.S, 1.0)
    if not (theta0 <= theta_hat_g < theta2):
        raise DomainError(f"theta_hat_g must lie in [theta0, theta2) = [{theta0}, {theta2})")
    if not (0.0 < mu_g <= 1.0):
        raise DomainError(f"mu_g must lie in (0, 1], got {mu_g}")

    if abs(_holdout_break_even_residual(d, mu_g, prim.p_g, p0, theta0, theta_hat_g, theta2)) > be_tol:
        return None

    f0 = float(d.cdf(theta0))
    rec_fn = pooled_margin_fn(d, prim.S, mu_g * f0, p0, theta0)
    margin_rec, _ = sup_margin(rec_fn, p0, prim.p_g, dev_grid_n)
    hold_fn = pooled_margin_fn(d, prim.S, (1.0 - mu_g) * f0, p0, theta_hat_g)
    margin_hold, _ = sup_margin(hold_fn, prim.p_g, 1.0 - prim.S, dev_grid_n)
    if max(margin_rec, margin_hold) > -strict_tol:
        return None
    return DelayedEquilibrium(
        theta_hat=theta0,
        theta_hat_g=theta_hat_g,
        theta2=theta2,
        mu_g=mu_g,
        price_m_t1=p0,
        price_recipients_t2=p0,
        price_holdouts_t2=prim.p_g,
        nodev_margin_recipients=margin_rec,
        nodev_margin_holdouts=margin_hold,
    )


def ds_solve(
    d: TypeDistribution,
    prim: MarketPrimitives,
    grid_n: int = 128,
    dev_grid_n: int = 512,
    strict_tol: float = STRICT_TOL,
) -> tuple[DelayedEquilibrium, ...]:
    """All delayed equilibria on a theta_hat_g grid over [theta0, theta2).

    The zero-profit condition is an equality curve in (theta_hat_g, mu_g)
    space, so the sweep solves mu_g in closed form for each theta_hat_g and
    verifies the margins; a raw 2-D grid would intersect the curve only by
    accident.  Every returned member shares the volume F(theta0) + F(theta2).
    """
    lf = laissez_faire(d, prim.S, prim.I)
    if lf.frozen or not prim.p_g > lf.p0:
        return ()
    theta0, p0 = lf.theta0, lf.p0
    theta2 = min(prim.p_g + prim.S, 1.0)
    if theta2 <= theta0:
        return ()
    out: list[DelayedEquilibrium] = []
    seen: set[float] = set()
    suff = ds_exists_sufficient(d, prim, dev_grid_n=dev_grid_n, strict_tol=strict_tol)
    if suff is not None:
        out.append(suff)
        seen.add(round(suff.theta_hat_g, 12))
    grid = np.linspace(theta0, theta2 - EDGE_MARGIN, grid_n)
    for th_g in grid:
        mu = _mu_from_break_even(d, prim.p_g, p0, theta0, float(th_g), theta2)
        if not (0.0 < mu <= 1.0):
            continue
        if round(float(th_g), 12) in seen:
            continue
        eq = ds_candidate(d, prim, float(th_g), mu, dev_grid_n=dev_grid_n, strict_tol=strict_tol)
        if eq is not None:
            out.append(eq)
    out.sort(key=lambda e: e.theta_hat_g)
    return tuple(out)


def ds_exists_sufficient(
    d: TypeDistribution,
    prim: MarketPrimitives,
    dev_grid_n: int = 512,
    strict_tol: float = STRICT_TOL,
) -> DelayedEquilibrium | None:
    """Constructive sufficiency: when p_g >= E[theta | theta0..gamma(theta0)],
    the mu_g = 1 equilibrium with p_g = E[theta | theta_hat_g..gamma(theta_hat_g)]
    exists.  Returns None when the condition fails (inconclusive, not proof of
    nonexistence)."""
    lf = laissez_faire(d, prim.S, prim.I)
    if lf.frozen:
        raise DomainError("economy is fully frozen; use benchmark.full_freeze_delayed")
    if not prim.p_g > lf.p0:
        raise DomainError(f"need p_g > p0 = {lf.p0}")
    threshold = trunc_mean(d, lf.theta0, gamma(d, prim.S, lf.theta0))
    if prim.p_g < threshold:
        return None

    def gap(a: float) -> float:
        return trunc_mean(d, a, gamma(d, prim.S, a)) - prim.p_g

    hi = 1.0 - 1e-9
    if gap(hi) < 0.0:
        raise NumericError("no bracket for the sufficiency cutoff", bracket=(lf.theta0, hi))
    theta_hat_g = bisect(gap, lf.theta0, hi)
    eq = ds_candidate(d, prim, theta_hat_g, 1.0, dev_grid_n=dev_grid_n, strict_tol=strict_tol)
    return eq


def classify(cutoffs: tuple[float, float, float], tol: float = 1e-9) -> EquilibriumClass:
    """Tag a cutoff triple (theta_hat, theta_hat_g, theta2).

    Short-lived iff theta_hat_g = theta2 (within tol), delayed otherwise.
    theta_hat = 0 is rejected except in the full-freeze pattern
    theta_hat_g < theta2, which is the delayed outcome of a frozen economy.
    """
    th, th_g, th2 = cutoffs
    if not (0.0 <= th <= th_g + tol and th_g <= th2 + tol and th2 <= 1.0 + tol):
        raise DomainError(f"cutoffs must satisfy 0 <= theta_hat <= theta_hat_g <= theta2 <= 1, got {cutoffs}")
    short = abs(th_g - th2) <= tol
    if th <= tol and short:
        raise DomainError("theta_hat = 0 is only admissible in the full-freeze delayed pattern")
    return EquilibriumClass("short_lived" if short else "delayed", cutoffs)
