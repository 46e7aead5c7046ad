"""Plot distance-to-setpoint against time for trial CSVs written by the harness.

    python scripts/plot_errors.py out/trials/setpoint_*_108in.csv -o errors.png

Each file becomes one line, labelled by its file name. Needs matplotlib
(the ``plot`` extra).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_error(path: Path) -> tuple[list[float], list[float]]:
    with open(path) as f:
        rows = list(csv.DictReader(f))
    return [float(r["t"]) for r in rows], [float(r["error_in"]) for r in rows]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("trials", nargs="+", type=Path, help="trial CSV files")
    ap.add_argument("-o", "--output", type=Path, default=Path("errors.png"))
    ap.add_argument("--threshold", type=float, default=1.0, help="setpoint radius to mark (in)")
    args = ap.parse_args(argv)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for path in args.trials:
        t, e = read_error(path)
        ax.plot(t, e, label=path.stem)
    ax.axhline(args.threshold, color="grey", linestyle=":", linewidth=1)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("distance to setpoint (in)")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
