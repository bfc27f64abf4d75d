"""Batch front door: parameter sweeps, welfare tables, and oracle runs.

Everything is emitted as deterministic CSV (fixed column order, 12
significant digits, empty cell for nonexistence, '\\n' line endings), so
repeated runs with the same configuration are byte-identical.  The plotting
component consumes exactly these files.

Exit codes: 0 success, 2 configuration error, 3 numeric non-convergence,
4 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import oracle as orc
from .benchmark import MarketPrimitives, full_freeze_delayed, laissez_faire, secret_bailout
from .delayed import ds_solve, ds_volume
from .dist import TypeDistribution, from_table_file, uniform
from .errors import ConfigError, ConsistencyError, DomainError, NumericError
from .shortlived import sl_solve, sl_volume
from .welfare import mechanism_from, welfare_of

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

ORACLE_GAIN_CONSTANT = 4.0  # acceptance bound is c/n on all oracle gains


@dataclass(frozen=True)
class RunConfig:
    dist: str = "uniform"  # "uniform" or "table:<path>"
    S: float = 1.0 / 3.0
    I: float = 0.1
    lam: float = 0.2
    pg_min: float = 0.34
    pg_max: float = 1.0
    pg_step: float = 0.005
    theta_grid_n: int = 192
    ds_grid_n: int = 128
    dev_grid_n: int = 512
    oracle_n: int = 2000
    strict_tol: float = 1e-7
    boundary_tol: float = 5e-3
    out_dir: str = "out"

    def validate(self) -> None:
        if self.S <= 0.0:
            raise ConfigError("S", "must be positive")
        if self.I <= 0.0:
            raise ConfigError("I", "must be positive")
        if self.lam < 0.0:
            raise ConfigError("lambda", "must be nonnegative")
        if self.pg_step <= 0.0:
            raise ConfigError("pg", "sweep step must be positive")
        if self.pg_max < self.pg_min:
            raise ConfigError("pg", "sweep max must be at least min")
        if self.theta_grid_n < 64:
            raise ConfigError("theta_grid_n", "minimum is 64")
        if self.ds_grid_n < 16:
            raise ConfigError("ds_grid_n", "minimum is 16")
        if self.dev_grid_n < 64:
            raise ConfigError("dev_grid_n", "minimum is 64")
        if self.oracle_n < 10:
            raise ConfigError("oracle_n", "minimum is 10")
        if self.strict_tol <= 0.0 or self.boundary_tol <= 0.0:
            raise ConfigError("tol", "tolerances must be positive")

    def pg_values(self) -> list[float]:
        count = int((self.pg_max - self.pg_min) / self.pg_step + 1e-9) + 1
        return [self.pg_min + k * self.pg_step for k in range(count)]

    def distribution(self) -> TypeDistribution:
        if self.dist == "uniform":
            return uniform()
        if self.dist.startswith("table:"):
            path = self.dist.split(":", 1)[1]
            try:
                return from_table_file(path)
            except (OSError, DomainError) as exc:
                raise ConfigError("dist", str(exc)) from exc
        raise ConfigError("dist", f"unknown distribution spec {self.dist!r}")


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".12g")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) if not isinstance(v, str) else v for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def run_sweep(config: RunConfig, welfare_only: bool = False) -> dict[str, Path]:
    """Sweep p_g and write sl_set.csv, ds_set.csv, volumes.csv, welfare.csv.

    Frozen economies take their delayed outcome from the full-freeze regime.
    sl_set.csv carries theta0 as a final reference column for the plots.
    """
    config.validate()
    d = config.distribution()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lf = laissez_faire(d, config.S, config.I)
    no_bailout_volume = 2.0 * float(d.cdf(lf.theta0))

    sl_rows, ds_rows, vol_rows, wel_rows = [], [], [], []
    for p_g in config.pg_values():
        prim = MarketPrimitives(S=config.S, I=config.I, lam=config.lam, p_g=p_g)
        feasible = p_g > lf.p0 and p_g >= config.I

        sl_res = None
        if feasible and not lf.frozen:
            sl_res = sl_solve(d, prim, config.theta_grid_n, config.dev_grid_n, config.strict_tol)
        sl_members = sl_res.members if sl_res else ()
        sl_vols = [sl_volume(d, m) for m in sl_members]
        sl_range = sl_res.theta_hat_range if sl_res else None

        ds_members, ds_vol = (), None
        if feasible and lf.frozen:
            ff = full_freeze_delayed(d, prim)
            ds_members = (ff,)
            ds_vol = ff.volume_total
            ds_g_lo = ds_g_hi = ff.sell_t1_threshold
        elif feasible:
            ds_members = ds_solve(d, prim, config.ds_grid_n, config.dev_grid_n, config.strict_tol)
            if ds_members:
                ds_vol = ds_volume(d, ds_members[0])
                ds_g_lo = min(m.theta_hat_g for m in ds_members)
                ds_g_hi = max(m.theta_hat_g for m in ds_members)

        secret_vol = None
        if feasible:
            secret_vol = secret_bailout(d, prim).volume_total

        sl_rows.append(
            [
                p_g,
                sl_range[0] if sl_range else None,
                sl_range[1] if sl_range else None,
                len(sl_members),
                min(sl_vols) if sl_vols else None,
                max(sl_vols) if sl_vols else None,
                lf.theta0,
            ]
        )
        ds_rows.append(
            [
                p_g,
                1 if ds_members else 0,
                ds_g_lo if ds_members else None,
                ds_g_hi if ds_members else None,
                ds_vol,
            ]
        )
        vol_rows.append(
            [
                p_g,
                min(sl_vols) if sl_vols else None,
                max(sl_vols) if sl_vols else None,
                ds_vol,
                secret_vol,
                no_bailout_volume,
            ]
        )

        lf_rep = welfare_of(d, prim, mechanism_from(lf, prim))
        wel_rows.append([p_g, "laissez_faire", lf_rep.welfare, lf_rep.deficit])
        if feasible:
            rep = welfare_of(d, prim, mechanism_from(secret_bailout(d, prim), prim))
            wel_rows.append([p_g, "secret", rep.welfare, rep.deficit])
        else:
            wel_rows.append([p_g, "secret", None, None])
        for tag, member in (("sl_lo", sl_members[0] if sl_members else None),
                            ("sl_hi", sl_members[-1] if sl_members else None)):
            if member is None:
                wel_rows.append([p_g, tag, None, None])
            else:
                rep = welfare_of(d, prim, mechanism_from(member, prim))
                wel_rows.append([p_g, tag, rep.welfare, rep.deficit])
        if ds_members:
            rep = welfare_of(d, prim, mechanism_from(ds_members[0], prim))
            wel_rows.append([p_g, "ds", rep.welfare, rep.deficit])
        else:
            wel_rows.append([p_g, "ds", None, None])

    paths = {}
    if not welfare_only:
        paths["sl_set"] = out / "sl_set.csv"
        _write_csv(
            paths["sl_set"],
            ["p_g", "theta_hat_min", "theta_hat_max", "count", "volume_min", "volume_max", "theta0"],
            sl_rows,
        )
        paths["ds_set"] = out / "ds_set.csv"
        _write_csv(paths["ds_set"], ["p_g", "exists", "theta_hat_g_min", "theta_hat_g_max", "volume"], ds_rows)
        paths["volumes"] = out / "volumes.csv"
        _write_csv(
            paths["volumes"],
            ["p_g", "sl_volume_min", "sl_volume_max", "ds_volume", "secret_volume", "no_bailout_volume"],
            vol_rows,
        )
    paths["welfare"] = out / "welfare.csv"
    _write_csv(paths["welfare"], ["p_g", "regime", "welfare", "deficit"], wel_rows)
    return paths


def run_verify(config: RunConfig, which: str) -> tuple[Path, bool]:
    """Oracle-verify one regime at the config's p_g; returns (csv path, ok)."""
    config.validate()
    d = config.distribution()
    p_g = config.pg_values()[0]
    prim = MarketPrimitives(S=config.S, I=config.I, lam=config.lam, p_g=p_g)
    grid = orc.discretize(d, config.oracle_n)
    lf = laissez_faire(d, config.S, config.I)

    if which == "laissez-faire":
        profile, prices = orc.profile_laissez_faire(grid, lf)
    elif which == "secret":
        profile, prices = orc.profile_secret(grid, secret_bailout(d, prim), prim)
    elif which == "full-freeze":
        profile, prices = orc.profile_full_freeze(grid, full_freeze_delayed(d, prim), prim)
    elif which == "sl":
        res = sl_solve(d, prim, config.theta_grid_n, config.dev_grid_n, config.strict_tol)
        if not res.members:
            raise DomainError(f"no short-lived equilibrium at p_g = {p_g}")
        profile, prices = orc.profile_short_lived(grid, res.members[len(res.members) // 2], prim)
    elif which in ("ds", "ds-mispriced"):
        members = ds_solve(d, prim, config.ds_grid_n, config.dev_grid_n, config.strict_tol)
        if not members:
            raise DomainError(f"no delayed equilibrium at p_g = {p_g}")
        profile, prices = orc.profile_delayed(grid, members[0], prim)
        if which == "ds-mispriced":
            # self-test hook: post the laissez-faire price to holdouts
            prices = replace(prices, p2_m=lf.p0)
    else:
        raise ConfigError("which", f"unknown regime selector {which!r}")

    report = orc.verify_profile(grid, profile, prices, prim, config.dev_grid_n)
    bound = ORACLE_GAIN_CONSTANT / config.oracle_n
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"verify_{which.replace('-', '_')}.csv"
    rows = [["worst_firm_gain", "", report.worst_firm_gain]]
    rows.append(["worst_buyer_gain", "", report.worst_buyer_gain])
    rows.append(["breakeven_residual", "", report.buyer_breakeven_residual])
    rows.extend([[agent, dev, gain] for agent, dev, gain in report.details])
    _write_csv(path, ["agent", "deviation", "gain"], rows)
    return path, report.passes(bound)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", f"unparsable config file: {exc}") from exc
    merged = {}
    for section in parser.sections():
        merged.update(dict(parser[section]))
    return merged


def _parse_pg(spec: str) -> tuple[float, float, float]:
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return v, v, 1.0
        if len(parts) == 3:
            return float(parts[0]), float(parts[1]), float(parts[2])
    except ValueError as exc:
        raise ConfigError("pg", f"bad value {spec!r}") from exc
    raise ConfigError("pg", f"expected <v> or <min>:<max>:<step>, got {spec!r}")


def _config_from_args(args) -> RunConfig:
    raw = _load_config(args.config)
    cfg = RunConfig()

    def pick(key, cast, current):
        if key in raw:
            try:
                return cast(raw[key])
            except ValueError as exc:
                raise ConfigError(key, f"bad value {raw[key]!r}") from exc
        return current

    cfg = replace(
        cfg,
        dist=raw.get("dist", cfg.dist),
        S=pick("s", float, cfg.S),
        I=pick("i", float, cfg.I),
        lam=pick("lambda", float, cfg.lam),
        theta_grid_n=pick("theta_grid_n", int, cfg.theta_grid_n),
        ds_grid_n=pick("ds_grid_n", int, cfg.ds_grid_n),
        dev_grid_n=pick("dev_grid_n", int, cfg.dev_grid_n),
        oracle_n=pick("oracle_n", int, cfg.oracle_n),
        strict_tol=pick("strict_tol", float, cfg.strict_tol),
        boundary_tol=pick("boundary_tol", float, cfg.boundary_tol),
        out_dir=raw.get("out", cfg.out_dir),
    )
    if "pg" in raw:
        lo, hi, step = _parse_pg(raw["pg"])
        cfg = replace(cfg, pg_min=lo, pg_max=hi, pg_step=step)

    if args.dist is not None:
        cfg = replace(cfg, dist=args.dist)
    if args.S is not None:
        cfg = replace(cfg, S=args.S)
    if args.I is not None:
        cfg = replace(cfg, I=args.I)
    if getattr(args, "lam", None) is not None:
        cfg = replace(cfg, lam=args.lam)
    if args.pg is not None:
        lo, hi, step = _parse_pg(args.pg)
        cfg = replace(cfg, pg_min=lo, pg_max=hi, pg_step=step)
    if args.oracle_n is not None:
        cfg = replace(cfg, oracle_n=args.oracle_n)
    if args.tol is not None:
        cfg = replace(cfg, strict_tol=args.tol)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bailout-game",
        description="Equilibrium sweeps for the two-period bailout game with stigma.",
    )

    def add_common(p):
        p.add_argument("--config", help="key = value config file (INI syntax)")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--dist", help="uniform | table:<path> (default: uniform)")
        p.add_argument("--pg", help="government price: <v> or <min>:<max>:<step> (default 0.34:1.0:0.005)")
        p.add_argument("--S", type=float, help="project surplus (default 1/3)")
        p.add_argument("--I", type=float, help="funding requirement (default 0.1)")
        p.add_argument("--lambda", type=float, dest="lam", help="fiscal friction (default 0.2)")
        p.add_argument("--oracle-n", type=int, dest="oracle_n", help="oracle grid cells (default 2000)")
        p.add_argument("--tol", type=float, help="margin strictness tolerance (default 1e-7)")

    sub = parser.add_subparsers(dest="command", required=True)
    add_common(sub.add_parser("laissez-faire", help="print the no-intervention benchmark"))
    add_common(sub.add_parser("sweep", help="full p_g sweep: sl_set, ds_set, volumes, welfare CSVs"))
    add_common(sub.add_parser("welfare", help="welfare table only"))
    add_common(sub.add_parser("figure6", help="sweep preset to the uniform example (S=1/3, I=1/10)"))
    ver = sub.add_parser("verify", help="oracle-verify one regime at the configured p_g")
    add_common(ver)
    ver.add_argument(
        "--which",
        default="ds",
        choices=["laissez-faire", "secret", "sl", "ds", "full-freeze", "ds-mispriced"],
        help="regime to verify (ds-mispriced is a self-test that must fail)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "figure6":
            cfg = replace(cfg, dist="uniform", S=1.0 / 3.0, I=0.1)
        cfg.validate()

        if args.command == "laissez-faire":
            d = cfg.distribution()
            lf = laissez_faire(d, cfg.S, cfg.I)
            print(f"theta0 = {_fmt(lf.theta0)}")
            print(f"p0 = {_fmt(lf.p0)}")
            print(f"frozen = {str(lf.frozen).lower()}")
            return EXIT_OK
        if args.command in ("sweep", "figure6"):
            paths = run_sweep(cfg)
            for name, path in sorted(paths.items()):
                print(f"{name}: {path}")
            return EXIT_OK
        if args.command == "welfare":
            paths = run_sweep(cfg, welfare_only=True)
            print(f"welfare: {paths['welfare']}")
            return EXIT_OK
        if args.command == "verify":
            path, ok = run_verify(cfg, args.which)
            print(f"report: {path}")
            print(f"verdict: {'pass' if ok else 'fail'}")
            return EXIT_OK if ok else EXIT_VERIFY
        raise ConfigError("command", f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, ConsistencyError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
