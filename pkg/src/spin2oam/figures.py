"""Matplotlib rendering of mode panels and fidelity summaries to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .optics import Image
from .tomography import TomographyReport

__all__ = ["save_mode_panels", "save_fidelity_chart"]


def save_mode_panels(images: dict[str, Image], path, title: str | None = None) -> Path:
    """One row of grayscale mode images, labeled by state, saved as PNG."""
    path = Path(path)
    n = len(images)
    fig, axes = plt.subplots(1, n, figsize=(2.2 * n, 2.6))
    if n == 1:
        axes = [axes]
    for ax, (label, image) in zip(axes, images.items()):
        half_x = image.grid.extent * image.grid.waist
        ax.imshow(
            image.values,
            cmap="inferno",
            extent=(-half_x, half_x, half_x, -half_x),
            origin="upper",
        )
        ax.set_title(label)
        ax.set_xticks([])
        ax.set_yticks([])
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_fidelity_chart(reports: list[TomographyReport], path) -> Path:
    """Bar chart of mean teleportation fidelity per input with error bars."""
    path = Path(path)
    labels = [r.label for r in reports]
    means = np.array([r.f_mean for r in reports])
    stds = np.array([r.f_std for r in reports])

    fig, ax = plt.subplots(figsize=(1.2 * len(reports) + 2, 3.2))
    ax.bar(labels, means, yerr=stds, capsize=4, color="#3b6ea5")
    ax.axhline(1.0, color="0.4", linestyle=":", linewidth=1)
    low = min(0.95, float((means - stds).min()) - 0.01) if len(means) else 0.95
    ax.set_ylim(max(0.0, low), 1.005)
    ax.set_ylabel("fidelity")
    ax.set_xlabel("input polarization")
    shots = reports[0].shots if reports else 0
    trials = reports[0].trials if reports else 0
    ax.set_title(f"teleported-state fidelity (N={shots}, {trials} trials)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
