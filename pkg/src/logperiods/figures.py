"""Matplotlib rendering of polygons and slope traces to image files."""

from __future__ import annotations

from fractions import Fraction


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_polygons(polygons: dict, path: str, title: str = "") -> str:
    """Overlay named polygons (Newton / Hodge-Tate / Smith) and save to path."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    markers = ["o", "s", "^", "d"]
    for idx, (name, poly) in enumerate(sorted(polygons.items())):
        xs = [float(x) for x, _ in poly.vertices]
        ys = [float(y) for _, y in poly.vertices]
        ax.plot(xs, ys, marker=markers[idx % len(markers)], label=name)
    ax.set_xlabel("index")
    ax.set_ylabel("height")
    ax.legend()
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_slope_trace(records, t_candidate, top_weight, path: str, title: str = "") -> str:
    """Plot (n, log-norm) of the trace with the candidate growth line."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    xs = [n for n, _ in records]
    ys = [float(Fraction(v)) for _, v in records]
    ax.plot(xs, ys, marker="o", label="trace")
    slope = float(Fraction(t_candidate) + top_weight)
    base = ys[0] - slope * xs[0]
    ax.plot(xs, [slope * x + base for x in xs], linestyle="--", label="candidate growth")
    ax.set_xlabel("level")
    ax.set_ylabel("log-norm at the level radius")
    ax.legend()
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
