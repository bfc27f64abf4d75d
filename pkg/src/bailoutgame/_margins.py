"""Supremum evaluation for buyer deviation margins.

A deviation margin is pooled-mean-of-attracted-types minus the offered price,
taken over a half-open price interval (lo, hi].  The left endpoint is always
excluded: there the margin degenerates to the on-path break-even value.  The
sup is a coarse grid pass followed by a golden-section polish around the best
grid point; the polish does not assume unimodality, it only sharpens the
incumbent maximum.
"""

from __future__ import annotations

import numpy as np

from .dist import TypeDistribution

_GOLDEN = 0.5 * (3.0 - np.sqrt(5.0))
_EMPTY_DOMAIN_PAD = 0.01


def pooled_margin_fn(
    d: TypeDistribution,
    S: float,
    base_mass: float,
    base_mean: float,
    band_lo: float,
    extend: bool = False,
):
    """Margin of offering p' to an audience made of a fixed pool (mass
    ``base_mass``, mean ``base_mean``) plus the band of currently-withdrawn
    types in (band_lo, p'+S] that the offer newly attracts.

    With ``extend=False`` the band is capped at the support's top (types
    beyond 1 do not exist).  With ``extend=True`` the band boundary is taken
    literally and the density continued at its boundary value beyond the
    support; this keeps the margin functional smooth in p_g across the point
    where band_lo = p_g + S leaves the support, matching the regime
    restriction p_g < 1 - S under which the cutoff system is derived.
    """
    base_value = base_mass * base_mean
    if extend:
        f_lo = float(d.cdf_extended(band_lo))

        def fn(p):
            p = np.asarray(p, dtype=float)
            c = p + S
            num = base_value + d.partial_mean_extended(band_lo, c)
            den = base_mass + d.cdf_extended(c) - f_lo
            return num / np.maximum(den, 1e-300) - p

        return fn

    f_lo = float(d.cdf(min(band_lo, 1.0)))

    def fn(p):
        p = np.asarray(p, dtype=float)
        c = np.minimum(p + S, 1.0)
        num = base_value + d.partial_mean(band_lo, c)
        den = base_mass + d.cdf(c) - f_lo
        return num / np.maximum(den, 1e-300) - p

    return fn


def sup_margin(fn, lo: float, hi: float, n: int = 512) -> tuple[float, float]:
    """Supremum of fn over the clipped interval [lo + span/n, hi]; returns
    (value, argmax price).

    The clip at the open left endpoint is deliberate: there the margin tends
    to the audience's break-even value (zero on the equilibrium path), which
    is a weak-inequality limit, not an attainable deviation profit.  Interior
    maxima are unaffected.  An empty interval (hi <= lo) is padded to the
    right: past the point where p' + S caps at 1 the attracted set is
    constant and the margin strictly decreasing, so points just above lo
    dominate the tail.
    """
    hi_eff = max(hi, lo + _EMPTY_DOMAIN_PAD)
    grid = lo + (hi_eff - lo) * np.arange(1, n + 1) / n
    vals = np.asarray(fn(grid), dtype=float)
    k = int(np.argmax(vals))
    best, p_best = float(vals[k]), float(grid[k])

    a = float(grid[k - 1]) if k > 0 else float(grid[0])
    b = float(grid[k + 1]) if k < n - 1 else hi_eff
    if b <= a:
        return best, p_best
    x1 = a + _GOLDEN * (b - a)
    x2 = b - _GOLDEN * (b - a)
    f1 = float(fn(np.array([x1]))[0])
    f2 = float(fn(np.array([x2]))[0])
    for _ in range(36):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = b - _GOLDEN * (b - a)
            f2 = float(fn(np.array([x2]))[0])
        else:
            b, x2, f2 = x2, x1, f1
            x1 = a + _GOLDEN * (b - a)
            f1 = float(fn(np.array([x1]))[0])
    for x, f in ((x1, f1), (x2, f2)):
        if f > best:
            best, p_best = f, x
    return best, p_best
