"""2x2 reconstruction panel: exact, initial guess, exact-data and noisy-data
reconstructions on a color scale anchored to the exact field."""

import argparse
import glob
import os
import sys

from .csvio import FigureInputError, read_field, same_grid
from .style import plt, save_deterministic

PANEL_TITLES = ("exact", "initial guess",
                "reconstruction (exact data)", "reconstruction (noisy data)")


def _last_reconstruction(run_dir):
    paths = sorted(glob.glob(os.path.join(run_dir, "recon_iter_*.csv")))
    if not paths:
        raise FigureInputError(f"no recon_iter_*.csv in {run_dir}")
    return paths[-1]


def render_reconstruction(in_dir, out_path, noisy_dir=None):
    noisy_dir = noisy_dir or in_dir
    fields = [
        read_field(os.path.join(in_dir, "exact_field.csv")),
        read_field(os.path.join(in_dir, "initial_field.csv")),
        read_field(_last_reconstruction(in_dir)),
        read_field(_last_reconstruction(noisy_dir)),
    ]
    for other in fields[1:]:
        if not same_grid(fields[0], other):
            raise FigureInputError("panel inputs do not share the (x1, x2) grid")

    vmin = fields[0][2].min()
    vmax = fields[0][2].max()
    fig, axes = plt.subplots(2, 2, figsize=(8.4, 7.4))
    for ax, (x1, x2, V), title in zip(axes.ravel(), fields, PANEL_TITLES):
        # V is indexed [x1, x2]; imshow wants rows along the vertical axis
        im = ax.imshow(V.T, origin="lower", vmin=vmin, vmax=vmax,
                       extent=(x1[0], x1[-1], x2[0], x2[-1]), cmap="viridis")
        ax.set_title(title, fontsize=10)
        ax.set_xlabel("$x_1$")
        ax.set_ylabel("$x_2$")
    fig.colorbar(im, ax=axes.ravel().tolist(), shrink=0.85)
    save_deterministic(fig, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-reconstruction",
        description="Render the 2x2 reconstruction panel from invert output.")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="invert output directory (exact-data run)")
    parser.add_argument("--noisy-dir", default=None,
                        help="invert output directory of the noisy-data run")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render_reconstruction(args.in_dir, args.out, args.noisy_dir)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
