"""Static SVG figures. Output is byte-stable: fixed hash salt, no date stamp."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "cohmatch"
plt.rcParams["svg.fonttype"] = "none"

_META = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)


def plot_diagram(D, path, title: str = ""):
    """Scatter of proper points per degree; points at infinity drawn on a top band."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    finite = [D.proper(d) for d in D.degrees]
    vals = np.concatenate([P.ravel() for P in finite] + [D.essential(d) for d in D.degrees] + [np.zeros(1)])
    lo, hi = float(vals.min()), float(vals.max())
    pad = 0.1 * (hi - lo or 1.0)
    top = hi + pad
    for d in D.degrees:
        P = D.proper(d)
        if len(P):
            ax.scatter(P[:, 0], P[:, 1], s=18, label=f"H{d}")
        E = D.essential(d)
        if len(E):
            ax.scatter(E, np.full(len(E), top), marker="^", s=24, label=f"H{d} (inf)")
    ax.plot([lo - pad, top], [lo - pad, top], color="0.5", lw=0.8)
    ax.axhline(top, color="0.8", lw=0.6, ls="--")
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    if title:
        ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7, loc="lower right")
    _save(fig, path)


def plot_vineyard(rows, path, title: str = ""):
    """Birth and death of every track against path time; diagonal stretches omitted."""
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.5), sharex=True)
    tracks = {}
    for d, l, tau, a, b, u, v, on in rows:
        tracks.setdefault((d, l), []).append((tau, u, v, on))
    for (d, l), samples in sorted(tracks.items()):
        s = np.array([(t, u, v) if not on else (t, math.nan, math.nan) for t, u, v, on in samples], dtype=float)
        axes[0].plot(s[:, 0], s[:, 1], lw=1, label=f"H{d}#{l + 1}")
        axes[1].plot(s[:, 0], s[:, 2], lw=1)
    axes[0].set_ylabel("birth")
    axes[1].set_ylabel("death")
    for ax in axes:
        ax.set_xlabel("tau")
    if title:
        fig.suptitle(title)
    if tracks and len(tracks) <= 12:
        axes[0].legend(fontsize=6)
    fig.tight_layout()
    _save(fig, path)


def plot_separation(grid, region, singular, path, title: str = ""):
    """Heatmap of the separation over the parameter grid with detected pairs marked."""
    fig, ax = plt.subplots(figsize=(5, 4))
    G = np.asarray(grid, dtype=float)
    G = np.where(np.isfinite(G), G, np.nan)
    im = ax.imshow(
        G.T, origin="lower", aspect="auto", cmap="viridis",
        extent=(region.a_min, region.a_max, region.b_min, region.b_max),
    )
    fig.colorbar(im, ax=ax, label="separation")
    for s in singular:
        ax.add_patch(plt.Circle(s.center, s.radius, fill=False, color="red", lw=1))
        ax.plot(*s.center, "r+", ms=8)
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    if title:
        ax.set_title(title)
    _save(fig, path)
