"""Render the equilibrium-sweep CSVs as static figures.

Three panels, each consuming the sweep CSVs as-is (no quantity is ever
re-derived from model primitives):

* sl_region -- supported short-lived thresholds per bailout price, shaded
  between theta_hat_min and theta_hat_max, with the delayed threshold theta0
  as a dotted reference line;
* volumes   -- short-lived volume band, delayed volume line, and the
  no-bailout baseline;
* welfare   -- one welfare curve per regime from the long-format table.

Rendering is a pure function of the CSV bytes: fixed figure size, default
fonts, no timestamps, so re-rendering unchanged inputs reproduces the image
byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

PANELS = ("sl_region", "volumes", "welfare")
FIGSIZE = (6.4, 4.2)
DPI = 130


class SchemaError(ValueError):
    """A CSV is missing a required column; the message names it."""


@dataclass(frozen=True)
class FigureSpec:
    csv_dir: str
    out_path: str
    panel: str
    x_label: str = "bailout price"
    y_label: str = ""

    def __post_init__(self):
        if self.panel not in PANELS:
            raise SchemaError(f"unknown panel {self.panel!r}; expected one of {PANELS}")


@dataclass
class Table:
    header: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def column(self, name: str) -> list[float | None]:
        if name not in self.header:
            raise SchemaError(f"missing column {name!r}")
        i = self.header.index(name)
        return [float(r[i]) if r[i] != "" else None for r in self.rows]

    def text_column(self, name: str) -> list[str]:
        if name not in self.header:
            raise SchemaError(f"missing column {name!r}")
        i = self.header.index(name)
        return [r[i] for r in self.rows]


def load_table(path: Path) -> Table:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty") from None
        return Table(header=header, rows=[row for row in reader if row])


def _band(ax, x, lo, hi, color, label):
    xs = [a for a, b, c in zip(x, lo, hi) if b is not None and c is not None]
    los = [b for b, c in zip(lo, hi) if b is not None and c is not None]
    his = [c for b, c in zip(lo, hi) if b is not None and c is not None]
    if xs:
        ax.fill_between(xs, los, his, color=color, alpha=0.45, linewidth=0, label=label)
        ax.plot(xs, los, color=color, linewidth=0.8)
        ax.plot(xs, his, color=color, linewidth=0.8)


def _line(ax, x, y, **kwargs):
    xs = [a for a, b in zip(x, y) if b is not None]
    ys = [b for b in y if b is not None]
    if xs:
        ax.plot(xs, ys, **kwargs)


def render(spec: FigureSpec) -> Path:
    """Draw one panel from the CSVs in spec.csv_dir and write spec.out_path."""
    csv_dir = Path(spec.csv_dir)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    try:
        if spec.panel == "sl_region":
            t = load_table(csv_dir / "sl_set.csv")
            x = t.column("p_g")
            _band(ax, x, t.column("theta_hat_min"), t.column("theta_hat_max"), "tab:blue", "short-lived thresholds")
            _line(ax, x, t.column("theta0"), color="tab:red", linestyle=":", linewidth=1.6,
                  label="delayed threshold (theta0)")
            ax.set_ylabel(spec.y_label or "marginal both-period seller")
        elif spec.panel == "volumes":
            t = load_table(csv_dir / "volumes.csv")
            x = t.column("p_g")
            _band(ax, x, t.column("sl_volume_min"), t.column("sl_volume_max"), "tab:blue", "short-lived volume")
            _line(ax, x, t.column("ds_volume"), color="tab:red", linewidth=1.8, label="delayed volume")
            _line(ax, x, t.column("no_bailout_volume"), color="0.4", linestyle="--", linewidth=1.2,
                  label="no-bailout volume")
            ax.set_ylabel(spec.y_label or "total units traded")
        else:  # welfare
            t = load_table(csv_dir / "welfare.csv")
            x_all = t.column("p_g")
            regimes = t.text_column("regime")
            w_all = t.column("welfare")
            styles = {
                "laissez_faire": dict(color="0.4", linestyle="--", linewidth=1.2),
                "secret": dict(color="tab:green", linewidth=2.4),
                "ds": dict(color="tab:red", linewidth=1.2),
                "sl_lo": dict(color="tab:blue", linewidth=1.0),
                "sl_hi": dict(color="tab:cyan", linewidth=1.0),
            }
            for regime in ("laissez_faire", "secret", "ds", "sl_lo", "sl_hi"):
                xs = [x for x, r, w in zip(x_all, regimes, w_all) if r == regime and w is not None]
                ws = [w for r, w in zip(regimes, w_all) if r == regime and w is not None]
                if xs:
                    ax.plot(xs, ws, label=regime, **styles.get(regime, {}))
            ax.set_ylabel(spec.y_label or "welfare")
    except (OSError, ValueError) as exc:
        plt.close(fig)
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from exc

    ax.set_xlabel(spec.x_label)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.25)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata={"Software": None})
    plt.close(fig)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="bailout-plots", description=__doc__.split("\n")[0])
    parser.add_argument("--csv-dir", required=True, help="directory holding the sweep CSVs")
    parser.add_argument("--out", required=True, help="output image path (or directory with --panel all)")
    parser.add_argument("--panel", default="all", choices=[*PANELS, "all"], help="which panel to draw")
    args = parser.parse_args(argv)
    panels = PANELS if args.panel == "all" else (args.panel,)
    try:
        for panel in panels:
            out = args.out if args.panel != "all" else str(Path(args.out) / f"{panel}.png")
            path = render(FigureSpec(csv_dir=args.csv_dir, out_path=out, panel=panel))
            print(f"{panel}: {path}")
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
