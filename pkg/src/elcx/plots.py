"""Figure rendering for the analysis reports, saved next to the CSV dumps."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_influence_heatmap(matrix, path, title: str = "") -> None:
    """Flip-probability heatmap of an influence matrix."""
    data = [[matrix.probability(i, j) for j in range(matrix.width)]
            for i in range(matrix.width)]
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    image = ax.imshow(data, cmap="viridis", vmin=0.0, vmax=1.0, origin="upper")
    ax.set_xlabel("output bit")
    ax.set_ylabel("input bit")
    if title:
        ax.set_title(title)
    fig.colorbar(image, ax=ax, label="flip probability")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_flip_profile(report, path, title: str = "") -> None:
    """Per-output-bit flip probabilities with the near-1/2 band marked."""
    bits = list(range(report.width))
    colors = ["tab:orange" if f else "tab:blue" for f in report.flagged]
    fig, ax = plt.subplots(figsize=(7.0, 3.5))
    ax.bar(bits, report.probabilities, color=colors)
    ax.axhline(0.5, color="black", linewidth=0.8)
    ax.axhspan(0.5 - report.threshold, 0.5 + report.threshold,
               color="gray", alpha=0.25, label=f"1/2 ± {report.threshold}")
    if report.window is not None:
        ax.axvspan(report.window - 0.5, report.window + report.y - 0.5,
                   color="tab:orange", alpha=0.15,
                   label=f"flagged window @{report.window}")
    ax.set_xlabel("output bit")
    ax.set_ylabel("flip probability")
    ax.set_ylim(0.0, 1.0)
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
