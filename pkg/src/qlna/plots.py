"""Figure rendering for sweep reports.

Heatmaps over the (drive frequency, transconductance) grid, written to file
next to the CSV output.  Matplotlib is imported lazily with the Agg backend
so the CSV path never depends on a display.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .response import ResponsePoint


def _grid_arrays(points: list[ResponsePoint], field: str):
    omegas = sorted({p.omega_in for p in points})
    gms = sorted({p.g_m for p in points})
    grid = np.full((len(gms), len(omegas)), np.nan)
    w_index = {w: i for i, w in enumerate(omegas)}
    g_index = {g: i for i, g in enumerate(gms)}
    for p in points:
        grid[g_index[p.g_m], w_index[p.omega_in]] = getattr(p, field)
    return np.array(omegas), np.array(gms), grid


_LABELS = {
    "n1ph": "first-oscillator photon number",
    "n2ph": "second-oscillator photon number",
    "nf": "noise figure (linear)",
    "nf_db": "noise figure (dB)",
}


def render_sweep_figure(points: list[ResponsePoint], fields: list[str],
                        path: str | Path) -> Path:
    """Render one heatmap panel per field and save the figure to ``path``."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    fig, axes = plt.subplots(1, len(fields), figsize=(6 * len(fields), 4.5),
                             squeeze=False)
    for ax, field in zip(axes[0], fields):
        omegas, gms, grid = _grid_arrays(points, field)
        plotted = np.log10(grid) if field.startswith("n") else grid
        mesh = ax.pcolormesh(omegas / (2 * math.pi * 1e9), gms, plotted,
                             shading="nearest", cmap="viridis")
        label = _LABELS.get(field, field)
        if field.startswith("n"):
            label = f"log10 {label}"
        fig.colorbar(mesh, ax=ax, label=label)
        ax.set_xlabel("drive frequency (GHz)")
        ax.set_ylabel("transconductance (S)")
        ax.set_title(label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
