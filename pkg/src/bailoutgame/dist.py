"""Asset-quality distributions on [0, 1] and their truncated moments.

Every equilibrium condition downstream is a ratio of the two primitives
implemented here: the cdf F and the partial first moment P(a, b) = integral of
theta * f(theta) over [a, b].  Two representations are supported:

* the uniform law, with exact closed forms, and
* a numeric law given by a two-column table (theta, density) interpolated
  linearly, for which F is piecewise quadratic and P piecewise cubic, so both
  are evaluated exactly segment by segment (no quadrature error beyond the
  tabulation itself).

All evaluators accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

UNIFORM = "analytic-uniform"
NUMERIC = "numeric-from-density"


@dataclass(frozen=True)
class TypeDistribution:
    """Law of the asset quality theta on [0, 1].

    ``knots``/``dens`` are empty for the uniform law.  For numeric laws the
    density is the piecewise-linear interpolant of (knots, dens), normalized
    to integrate to one; ``_cdf_knots`` and ``_pm_knots`` cache F and the
    partial first moment at the knots.
    """

    kind: str
    knots: np.ndarray = field(default_factory=lambda: np.empty(0))
    dens: np.ndarray = field(default_factory=lambda: np.empty(0))
    _cdf_knots: np.ndarray = field(default_factory=lambda: np.empty(0))
    _pm_knots: np.ndarray = field(default_factory=lambda: np.empty(0))

    # -- primitive evaluators ------------------------------------------------

    def cdf(self, x):
        """F(x), clamped to [0, 1] outside the support."""
        if self.kind == UNIFORM:
            return np.clip(x, 0.0, 1.0) if isinstance(x, np.ndarray) else min(max(x, 0.0), 1.0)
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        xc = np.clip(x_arr, 0.0, 1.0)
        i = np.clip(np.searchsorted(self.knots, xc, side="right") - 1, 0, len(self.knots) - 2)
        x0, x1 = self.knots[i], self.knots[i + 1]
        d0, d1 = self.dens[i], self.dens[i + 1]
        t = xc - x0
        slope = (d1 - d0) / (x1 - x0)
        out = self._cdf_knots[i] + d0 * t + 0.5 * slope * t * t
        out = np.clip(out, 0.0, 1.0)
        return out if isinstance(x, np.ndarray) else float(out[0])

    def density(self, x):
        """f(x); zero outside [0, 1]."""
        if self.kind == UNIFORM:
            if isinstance(x, np.ndarray):
                return np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0)
            return 1.0 if 0.0 <= x <= 1.0 else 0.0
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.interp(x_arr, self.knots, self.dens, left=0.0, right=0.0)
        out[(x_arr < 0.0) | (x_arr > 1.0)] = 0.0
        return out if isinstance(x, np.ndarray) else float(out[0])

    def partial_mean(self, a, b):
        """P(a, b) = integral of theta * f(theta) over [a, b] (exact)."""
        if self.kind == UNIFORM:
            a_ = np.clip(a, 0.0, 1.0)
            b_ = np.clip(b, 0.0, 1.0)
            return 0.5 * (b_ * b_ - a_ * a_)
        return self._pm_at(b) - self._pm_at(a)

    def _pm_at(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        xc = np.clip(x_arr, 0.0, 1.0)
        i = np.clip(np.searchsorted(self.knots, xc, side="right") - 1, 0, len(self.knots) - 2)
        x0, x1 = self.knots[i], self.knots[i + 1]
        d0 = self.dens[i]
        slope = (self.dens[i + 1] - d0) / (x1 - x0)
        # integral of t*(d0 + slope*(t-x0)) dt from x0 to x
        out = (
            self._pm_knots[i]
            + d0 * 0.5 * (xc * xc - x0 * x0)
            + slope * ((xc**3 - x0**3) / 3.0 - x0 * 0.5 * (xc * xc - x0 * x0))
        )
        return out if isinstance(x, np.ndarray) else float(out[0])

    def cdf_integral(self, a: float, b: float) -> float:
        """Integral of F(theta) over [a, b] (exact); the welfare cost kernel
        integral of (F/f - S) Q f reduces to this minus S times mass."""
        if self.kind == UNIFORM:
            a_, b_ = min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)
            return 0.5 * (b_ * b_ - a_ * a_)
        # integrate the piecewise-quadratic F exactly on each covered segment
        a_, b_ = min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)
        if b_ <= a_:
            return 0.0
        total = 0.0
        i0 = int(np.clip(np.searchsorted(self.knots, a_, side="right") - 1, 0, len(self.knots) - 2))
        i1 = int(np.clip(np.searchsorted(self.knots, b_, side="right") - 1, 0, len(self.knots) - 2))
        for i in range(i0, i1 + 1):
            lo = max(a_, float(self.knots[i]))
            hi = min(b_, float(self.knots[i + 1]))
            if hi <= lo:
                continue
            x0 = float(self.knots[i])
            d0 = float(self.dens[i])
            s = float(self.dens[i + 1] - self.dens[i]) / float(self.knots[i + 1] - self.knots[i])
            c0 = float(self._cdf_knots[i])
            # F(x) = c0 + d0*(x-x0) + s*(x-x0)^2/2 on the segment
            u1, u0 = hi - x0, lo - x0
            total += c0 * (u1 - u0) + d0 * (u1 * u1 - u0 * u0) / 2.0 + s * (u1**3 - u0**3) / 6.0
        return total

    def mean(self) -> float:
        return float(self.partial_mean(0.0, 1.0))

    def boundary_density(self) -> float:
        """f(1), the density at the top of the support."""
        if self.kind == UNIFORM:
            return 1.0
        return float(self.dens[-1])

    def cdf_extended(self, x):
        """F continued beyond 1 at the boundary density: 1 + f(1)*(x-1).

        Used only by deviation-margin bookkeeping that treats the marginal
        acceptor cutoff p_g + S literally when it exceeds the support.
        """
        x_arr = np.asarray(x, dtype=float)
        base = self.cdf(np.minimum(x_arr, 1.0) if isinstance(x, np.ndarray) else min(float(x), 1.0))
        extra = self.boundary_density() * np.maximum(x_arr - 1.0, 0.0)
        out = base + extra
        return out if isinstance(x, np.ndarray) else float(out)

    def partial_mean_extended(self, a, b):
        """Partial first moment under the boundary-density continuation."""
        a_arr = np.asarray(a, dtype=float)
        b_arr = np.asarray(b, dtype=float)
        core = self.partial_mean(np.minimum(a_arr, 1.0), np.minimum(b_arr, 1.0))
        f1 = self.boundary_density()
        ae = np.maximum(a_arr, 1.0)
        be = np.maximum(b_arr, 1.0)
        tail = f1 * 0.5 * (be * be - ae * ae)
        out = core + tail
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            return out
        return float(out)

    def quantile(self, q):
        """F^{-1}(q) by monotone bisection (vectorized)."""
        q_arr = np.atleast_1d(np.asarray(q, dtype=float))
        if np.any((q_arr < 0.0) | (q_arr > 1.0)):
            raise DomainError("quantile levels must lie in [0, 1]")
        if self.kind == UNIFORM:
            out = q_arr.copy()
            return out if isinstance(q, np.ndarray) else float(out[0])
        lo = np.zeros_like(q_arr)
        hi = np.ones_like(q_arr)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < q_arr
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return out if isinstance(q, np.ndarray) else float(out[0])


# -- constructors -------------------------------------------------------------


def uniform() -> TypeDistribution:
    """The uniform law on [0, 1] (all moments in closed form)."""
    return TypeDistribution(kind=UNIFORM)


def from_table(knots, dens) -> TypeDistribution:
    """Numeric law from a (theta, density) table, linearly interpolated.

    Knots must cover [0, 1]; density values must be nonnegative.  The density
    is renormalized to integrate to one.
    """
    knots = np.asarray(knots, dtype=float)
    dens = np.asarray(dens, dtype=float)
    if knots.ndim != 1 or knots.shape != dens.shape or len(knots) < 2:
        raise DomainError("table must be two equal-length columns with at least 2 rows")
    order = np.argsort(knots)
    knots, dens = knots[order], dens[order]
    if abs(knots[0]) > 1e-12 or abs(knots[-1] - 1.0) > 1e-12:
        raise DomainError("table knots must span [0, 1]")
    knots[0], knots[-1] = 0.0, 1.0
    if np.any(np.diff(knots) <= 0):
        raise DomainError("table knots must be strictly increasing")
    if np.any(dens < 0):
        raise DomainError("density values must be nonnegative")
    seg = np.diff(knots) * 0.5 * (dens[:-1] + dens[1:])
    total = float(seg.sum())
    if total <= 0:
        raise DomainError("density integrates to zero")
    dens = dens / total
    cdf_knots = np.concatenate([[0.0], np.cumsum(np.diff(knots) * 0.5 * (dens[:-1] + dens[1:]))])
    cdf_knots[-1] = 1.0
    # partial first moments at knots: cumulative integral of t*f(t)
    x0, x1 = knots[:-1], knots[1:]
    d0, d1 = dens[:-1], dens[1:]
    slope = (d1 - d0) / (x1 - x0)
    seg_pm = d0 * 0.5 * (x1 * x1 - x0 * x0) + slope * ((x1**3 - x0**3) / 3.0 - x0 * 0.5 * (x1 * x1 - x0 * x0))
    pm_knots = np.concatenate([[0.0], np.cumsum(seg_pm)])
    return TypeDistribution(kind=NUMERIC, knots=knots, dens=dens, _cdf_knots=cdf_knots, _pm_knots=pm_knots)


def from_table_file(path) -> TypeDistribution:
    """Load a two-column whitespace/comma-separated (theta, density) table."""
    data = np.loadtxt(path, delimiter=None if _sniff_whitespace(path) else ",")
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError(f"{path}: expected two columns (theta, density)")
    return from_table(data[:, 0], data[:, 1])


def _sniff_whitespace(path) -> bool:
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                return "," not in line
    return True


def from_density(fn, n: int = 2048) -> TypeDistribution:
    """Tabulate a density callable on n+1 equispaced knots."""
    x = np.linspace(0.0, 1.0, n + 1)
    return from_table(x, np.asarray([fn(v) for v in x], dtype=float))


# -- operations ---------------------------------------------------------------


def trunc_mean(d: TypeDistribution, a: float, b: float) -> float:
    """E[theta | a <= theta <= b].

    Degenerate truncations (a = b or zero mass) return a, so cutoff scans
    never divide by zero.  The result is clamped into [a, b].
    """
    if not (0.0 <= a <= b <= 1.0):
        raise DomainError(f"need 0 <= a <= b <= 1, got a={a}, b={b}")
    mass = float(d.cdf(b)) - float(d.cdf(a))
    if a == b or mass <= 0.0:
        return a
    m = float(d.partial_mean(a, b)) / mass
    return min(max(m, a), b)


def lower_mean(d: TypeDistribution, b: float) -> float:
    """E[theta | theta <= b]; zero when b = 0."""
    return trunc_mean(d, 0.0, b)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_point: float
    worst_value: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(d: TypeDistribution, grid_n: int = 256) -> ValidationReport:
    """Spot-check the modelling assumptions on a grid.

    Checks, in order: cdf/density consistency (|F(b)-F(a) - int f| <= 1e-9 on
    grid pairs, with the integral re-done by Simpson so the check is not
    circular), log-concavity of f (second differences of log f <= tol where
    f > 0; the uniform law sits exactly at zero, hence the weak inequality),
    and the regularity condition that a -> 2 E[theta | a<th<b] - E[theta|th<=a]
    is nondecreasing for each fixed b.  Failures are reported, not raised.
    """
    if grid_n < 16:
        raise DomainError("grid_n must be at least 16")
    checks = []

    # cdf consistency against an independent Simpson quadrature of density
    pairs = [(i / 8.0, j / 8.0) for i in range(9) for j in range(i + 1, 9)]
    worst_gap, worst_pt = 0.0, 0.0
    for a, b in pairs:
        m = 4 * grid_n
        x = np.linspace(a, b, 2 * m + 1)
        y = d.density(x)
        simpson = (b - a) / (6.0 * m) * float(y[0] + y[-1] + 4.0 * y[1::2].sum() + 2.0 * y[2:-1:2].sum())
        gap = abs(float(d.cdf(b)) - float(d.cdf(a)) - simpson)
        if gap > worst_gap:
            worst_gap, worst_pt = gap, a
    tol_cdf = 1e-9 if d.kind == UNIFORM else max(1e-9, 4.0 / grid_n**2)
    checks.append(CheckResult("cdf_density_consistency", worst_gap <= tol_cdf, worst_pt, worst_gap))

    # log-concavity: second differences of log f on the grid
    x = np.linspace(0.0, 1.0, grid_n + 1)[1:-1]
    fx = np.asarray(d.density(x), dtype=float)
    pos = fx > 0.0
    worst_val, worst_pt, ok = -np.inf, 0.0, True
    lf = np.where(pos, np.log(np.where(pos, fx, 1.0)), np.nan)
    for i in range(1, len(x) - 1):
        if pos[i - 1] and pos[i] and pos[i + 1]:
            d2 = lf[i - 1] - 2.0 * lf[i] + lf[i + 1]
            if d2 > worst_val:
                worst_val, worst_pt = d2, float(x[i])
    if worst_val == -np.inf:
        worst_val = 0.0
    ok = worst_val <= 1e-9
    checks.append(CheckResult("log_concavity", ok, worst_pt, worst_val))

    # regularity: 2*E[theta | a<th<b] - E[theta | th<=a] nondecreasing in a
    worst_val, worst_pt = np.inf, 0.0
    for b in (0.25, 0.5, 0.75, 1.0):
        a_grid = np.linspace(0.0, b, max(16, grid_n // 4))[1:-1]
        vals = [2.0 * trunc_mean(d, float(a), b) - lower_mean(d, float(a)) for a in a_grid]
        diffs = np.diff(vals)
        if len(diffs):
            i = int(np.argmin(diffs))
            if diffs[i] < worst_val:
                worst_val, worst_pt = float(diffs[i]), float(a_grid[i])
    if worst_val == np.inf:
        worst_val = 0.0
    checks.append(CheckResult("regularity", worst_val >= -1e-9, worst_pt, worst_val))

    return ValidationReport(tuple(checks))
