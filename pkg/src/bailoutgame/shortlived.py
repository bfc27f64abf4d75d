"""Short-lived stimulation equilibria.

In this class every government seller either also trades in t=2 (types up to
theta_hat) or boycotts the t=2 market (types up to theta_hat_g = min(p_g+S, 1));
nobody delays a sale to t=2.  Given theta_hat the cutoff system is linear:

    arbitrage      p_g + mean_g = 2 * mean_m
    indifference   2 * mean_m + 2S = theta_hat + p_g + S
    holdout        theta_hat_g = min(p_g + S, 1)

so mean_g = theta_hat - S, mean_m = (theta_hat + p_g - S) / 2, and the bailout
share mu_g follows from mu_g*mean_g + (1-mu_g)*mean_m = E[theta|theta<=theta_hat].
Feasibility and the two buyer no-deviation suprema then decide whether the
candidate is an equilibrium.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._margins import pooled_margin_fn, sup_margin
from .benchmark import MarketPrimitives, laissez_faire
from .dist import TypeDistribution, lower_mean
from .errors import DomainError

STRICT_TOL = 1e-7
EDGE_MARGIN = 1e-6


@dataclass(frozen=True)
class ShortLivedEquilibrium:
    theta_hat: float
    theta_hat_g: float
    mu_g: float
    mean_g: float  # average type of bailout acceptors below theta_hat; the t=2 price they face
    mean_m: float  # average type of market sellers; the t=1 and t=2 market price
    stigma: float  # mean_m - mean_g, the haircut applied to known recipients
    nodev_margin_recipients: float | None = None
    nodev_margin_holdouts: float | None = None


@dataclass(frozen=True)
class SLSolveResult:
    members: tuple[ShortLivedEquilibrium, ...]
    intervals: tuple[tuple[float, float], ...]  # supported theta_hat ranges, endpoint-refined
    indeterminate: tuple[float, ...]  # theta_hat grid points with margins in (-tol, 0)

    def __bool__(self) -> bool:
        return bool(self.members)

    @property
    def theta_hat_range(self) -> tuple[float, float] | None:
        if not self.intervals:
            return None
        return (self.intervals[0][0], self.intervals[-1][1])


def sl_volume(d: TypeDistribution, eq: ShortLivedEquilibrium) -> float:
    return float(d.cdf(eq.theta_hat)) + float(d.cdf(eq.theta_hat_g))


def _build_candidate(d, prim, theta_hat, lf) -> tuple[ShortLivedEquilibrium | None, str | None]:
    if not prim.p_g > lf.p0:
        raise DomainError(f"need p_g > p0 = {lf.p0}")
    if not (0.0 < theta_hat < lf.theta0):
        raise DomainError(f"theta_hat must lie in (0, theta0) = (0, {lf.theta0})")
    S, p_g = prim.S, prim.p_g
    mean_g = theta_hat - S
    mean_m = 0.5 * (theta_hat + p_g - S)
    if not (mean_g < mean_m < p_g):
        return None, "ordering"
    if mean_g < prim.I:
        return None, "funding"
    pool_mean = lower_mean(d, theta_hat)
    mu_g = (mean_m - pool_mean) / (mean_m - mean_g)
    if not (0.0 < mu_g < 1.0):
        return None, "mu_range"
    floor = lower_mean(d, float(d.quantile(mu_g * float(d.cdf(theta_hat)))))
    if mean_g < floor - 1e-12:
        return None, "composition"
    eq = ShortLivedEquilibrium(
        theta_hat=theta_hat,
        theta_hat_g=min(p_g + S, 1.0),
        mu_g=mu_g,
        mean_g=mean_g,
        mean_m=mean_m,
        stigma=mean_m - mean_g,
    )
    return eq, None


def sl_candidate(d: TypeDistribution, prim: MarketPrimitives, theta_hat: float) -> ShortLivedEquilibrium | None:
    """Cutoff-system candidate at theta_hat, or None if infeasible.

    No-deviation margins are not evaluated here; see sl_nodev_check.
    """
    lf = laissez_faire(d, prim.S, prim.I)
    eq, _ = _build_candidate(d, prim, theta_hat, lf)
    return eq


def sl_rejection_reason(d: TypeDistribution, prim: MarketPrimitives, theta_hat: float) -> str | None:
    """Name of the feasibility constraint a candidate violates (None if feasible)."""
    lf = laissez_faire(d, prim.S, prim.I)
    _, reason = _build_candidate(d, prim, theta_hat, lf)
    return reason


def sl_nodev_check(
    d: TypeDistribution,
    prim: MarketPrimitives,
    cand: ShortLivedEquilibrium,
    grid_n: int = 512,
) -> tuple[float, float]:
    """Buyer no-deviation suprema for a candidate; both must be negative.

    Recipients' audience: offers p' in (mean_g, p_g] attract all recipient
    sellers plus boycotters up to p'+S.  Holdouts' audience: offers p' > p_g
    attract all t=1 market sellers plus never-sellers in (p_g+S, p'+S].  The
    holdout check keeps the marginal-acceptor boundary p_g + S literal
    (boundary-density continuation past the support) so the supported set
    varies continuously in p_g; on p_g < 1 - S, where the cutoff system is
    derived, the continuation is inactive and the check is the textbook one.
    """
    S, p_g = prim.S, prim.p_g
    f_hat = float(d.cdf(cand.theta_hat))
    rec_fn = pooled_margin_fn(d, S, cand.mu_g * f_hat, cand.mean_g, cand.theta_hat)
    margin_rec, _ = sup_margin(rec_fn, cand.mean_g, p_g, grid_n)
    hold_fn = pooled_margin_fn(d, S, (1.0 - cand.mu_g) * f_hat, cand.mean_m, p_g + S, extend=True)
    margin_hold, _ = sup_margin(hold_fn, p_g, max(1.0 - S, p_g) + 1.0, grid_n)
    return margin_rec, margin_hold


def _checked(d, prim, theta_hat, lf, dev_grid_n):
    """(equilibrium-with-margins or None, worst margin or None, feasible?)."""
    cand, _ = _build_candidate(d, prim, theta_hat, lf)
    if cand is None:
        return None, None, False
    margin_rec, margin_hold = sl_nodev_check(d, prim, cand, dev_grid_n)
    eq = replace(cand, nodev_margin_recipients=margin_rec, nodev_margin_holdouts=margin_hold)
    return eq, max(margin_rec, margin_hold), True


def sl_solve(
    d: TypeDistribution,
    prim: MarketPrimitives,
    grid_n: int = 192,
    dev_grid_n: int = 512,
    strict_tol: float = STRICT_TOL,
) -> SLSolveResult:
    """Sweep theta_hat over (0, theta0) and keep candidates whose feasibility
    and both no-deviation margins pass (margins <= -strict_tol).

    Margins in (-strict_tol, 0) are boundary-indeterminate and reported
    separately rather than counted as equilibria.  Supported-interval
    endpoints are refined by bisection on the pass/fail predicate.
    """
    if grid_n < 64:
        raise DomainError("grid_n must be at least 64")
    lf = laissez_faire(d, prim.S, prim.I)
    if not prim.p_g > lf.p0:
        raise DomainError(f"need p_g > p0 = {lf.p0}")
    if lf.theta0 <= 0.0:
        return SLSolveResult((), (), ())

    lo = EDGE_MARGIN
    hi = lf.theta0 - EDGE_MARGIN
    if hi <= lo:
        return SLSolveResult((), (), ())
    grid = np.linspace(lo, hi, grid_n)

    members: list[ShortLivedEquilibrium] = []
    indeterminate: list[float] = []
    passed = np.zeros(grid_n, dtype=bool)
    for i, th in enumerate(grid):
        eq, worst, feasible = _checked(d, prim, float(th), lf, dev_grid_n)
        if not feasible:
            continue
        if worst <= -strict_tol:
            passed[i] = True
            members.append(eq)
        elif worst < 0.0:
            indeterminate.append(float(th))

    def pass_at(th: float) -> bool:
        _, worst, feasible = _checked(d, prim, th, lf, dev_grid_n)
        return feasible and worst <= -strict_tol

    if not members:
        # near the existence boundary the supported window can be narrower
        # than the grid spacing; a golden polish on the worst margin still
        # finds it when it exists
        best = _min_worst_margin(d, prim, lf, grid_n, dev_grid_n, return_arg=True)
        if best is not None and best[0] <= -strict_tol:
            th_star = best[1]
            eq, _, _ = _checked(d, prim, th_star, lf, dev_grid_n)
            members.append(eq)
            left = _refine_boundary(pass_at, max(lo, th_star - (hi - lo) / grid_n), th_star)
            right = _refine_boundary(pass_at, min(hi, th_star + (hi - lo) / grid_n), th_star)
            return SLSolveResult(tuple(members), ((left, right),), tuple(indeterminate))

    intervals: list[tuple[float, float]] = []
    i = 0
    while i < grid_n:
        if not passed[i]:
            i += 1
            continue
        j = i
        while j + 1 < grid_n and passed[j + 1]:
            j += 1
        left = float(grid[i])
        if i > 0:
            left = _refine_boundary(pass_at, float(grid[i - 1]), float(grid[i]))
        right = float(grid[j])
        if j + 1 < grid_n:
            right = _refine_boundary(pass_at, float(grid[j + 1]), float(grid[j]))
        intervals.append((left, right))
        i = j + 1

    return SLSolveResult(tuple(members), tuple(intervals), tuple(indeterminate))


def _refine_boundary(pass_at, failing: float, passing: float, iters: int = 22) -> float:
    """Bisect the pass/fail predicate between a failing and a passing point."""
    for _ in range(iters):
        mid = 0.5 * (failing + passing)
        if pass_at(mid):
            passing = mid
        else:
            failing = mid
        if abs(passing - failing) < 1e-9:
            break
    return passing


def sl_existence_bound(d: TypeDistribution, S: float, I: float) -> float:
    """Upper bound 2*theta0 - E[theta | theta <= theta0] above which no
    short-lived stimulation equilibrium can exist."""
    lf = laissez_faire(d, S, I)
    if lf.frozen or lf.theta0 >= 1.0:
        raise DomainError("existence bound needs an interior laissez-faire cutoff")
    return 2.0 * lf.theta0 - lf.p0


def _min_worst_margin(d, prim, lf, grid_n: int, dev_grid_n: int, return_arg: bool = False):
    """Minimum over feasible theta_hat of the worst no-deviation margin.

    Coarse scan plus a golden polish around the best grid point; near the
    existence boundary the passing theta_hat window is narrow, so the polish
    is what keeps the emptiness probe sharp.  Returns the minimum, or
    (minimum, argmin) with return_arg, or None/inf when nothing is feasible.
    """
    grid = np.linspace(EDGE_MARGIN, lf.theta0 - EDGE_MARGIN, grid_n)

    def worst(th: float) -> float:
        _, w, feasible = _checked(d, prim, th, lf, dev_grid_n)
        return w if feasible else np.inf

    vals = np.array([worst(float(t)) for t in grid])
    k = int(np.argmin(vals))
    best, arg = float(vals[k]), float(grid[k])
    if not np.isfinite(best):
        return None if return_arg else best
    a = float(grid[max(k - 1, 0)])
    b = float(grid[min(k + 1, grid_n - 1)])
    g = 0.5 * (3.0 - np.sqrt(5.0))
    x1, x2 = a + g * (b - a), b - g * (b - a)
    f1, f2 = worst(x1), worst(x2)
    for _ in range(40):
        if f1 > f2:
            a, x1, f1 = x1, x2, f2
            x2 = b - g * (b - a)
            f2 = worst(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = a + g * (b - a)
            f1 = worst(x1)
    for x, f in ((x1, f1), (x2, f2)):
        if f < best:
            best, arg = f, x
    return (best, arg) if return_arg else best


def sl_boundary(
    d: TypeDistribution,
    S: float,
    I: float,
    tol: float = 5e-3,
    grid_n: int = 128,
    dev_grid_n: int = 384,
    probe_n: int = 16,
    strict_tol: float = STRICT_TOL,
) -> float | None:
    """Supremum of p_g supporting a nonempty short-lived set, or None.

    Bisects on emptiness between the laissez-faire price and the theoretical
    existence bound; None when no probed p_g yields equilibria.
    """
    lf = laissez_faire(d, S, I)
    if lf.frozen or lf.theta0 >= 1.0:
        return None
    bound = 2.0 * lf.theta0 - lf.p0

    def nonempty(p_g: float) -> bool:
        prim = MarketPrimitives(S=S, I=I, p_g=p_g)
        return _min_worst_margin(d, prim, lf, grid_n, dev_grid_n) <= -strict_tol

    probes = np.linspace(lf.p0 + 1e-3, min(bound, 1.0) - 1e-6, probe_n)
    lo = None
    for p in probes:
        if nonempty(float(p)):
            lo = float(p)
    if lo is None:
        return None
    hi = min(bound, 1.0)
    above = probes[probes > lo]
    for p in above:
        if not nonempty(float(p)):
            hi = min(hi, float(p))
            break
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if nonempty(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
