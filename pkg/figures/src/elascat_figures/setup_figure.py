"""Grid/basis overview figure: node scatter plus the 1D basis curves."""

import argparse
import os
import sys

from .csvio import FigureInputError, read_columns
from .style import plt, save_deterministic


def render_setup(in_dir, out_path):
    grid = read_columns(os.path.join(in_dir, "grid.csv"))
    boundary = read_columns(os.path.join(in_dir, "boundary.csv"))
    basis = read_columns(os.path.join(in_dir, "basis.csv"))
    curves = [name for name in basis if name.startswith("g")]
    if not curves:
        raise FigureInputError("basis.csv carries no basis curves")

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.2))
    inside = grid["inside"] > 0.5
    ax1.scatter(grid["x1"][~inside], grid["x2"][~inside], s=6, c="lightgray",
                label="outside")
    ax1.scatter(grid["x1"][inside], grid["x2"][inside], s=6, c="red",
                label="interior")
    ax1.scatter(boundary["x1"], boundary["x2"], s=10, c="blue",
                label="boundary")
    ax1.set_aspect("equal")
    ax1.set_xlabel("$x_1$")
    ax1.set_ylabel("$x_2$")
    ax1.set_title("collocation nodes")
    ax1.legend(loc="upper right", fontsize=8)

    for name in sorted(curves, key=lambda s: int(s[1:])):
        ax2.plot(basis["x"], basis[name], lw=1.2)
    ax2.set_xlabel("$x$")
    ax2.set_title("basis functions")
    fig.tight_layout()
    save_deterministic(fig, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-setup",
        description="Render the grid/basis overview from solver CSV output.")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory with grid.csv, boundary.csv, basis.csv")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render_setup(args.in_dir, args.out)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
