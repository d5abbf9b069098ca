"""Matplotlib rendering of the same plot specs the SVG writer consumes."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .svgplot import PALETTE, PlotSpec  # noqa: E402


def save_figure(spec: PlotSpec, path, dpi=150) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7.2, 4.4))
    for i, s in enumerate(spec.series):
        ax.plot(s.x, s.y, color=PALETTE[i % len(PALETTE)], linestyle="--" if s.dashed else "-",
                linewidth=1.5, label=s.name)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(frameon=False, fontsize=9)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    # no Software/date metadata, so reruns give the same file
    fig.savefig(path, dpi=dpi, metadata={"Software": None})
    plt.close(fig)
    return path
