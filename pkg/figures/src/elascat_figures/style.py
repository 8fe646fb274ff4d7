"""Shared matplotlib setup: headless backend and byte-deterministic saving."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

DPI = 150


def save_deterministic(fig, out_path):
    """Write a PNG whose bytes depend only on the drawn content."""
    fig.savefig(out_path, dpi=DPI, metadata={"Software": None})
    plt.close(fig)
