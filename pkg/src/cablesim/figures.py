"""Static PNG renderings of simulation reports.

Everything draws through the Agg backend with pinned metadata, so a rerun
with the same inputs produces byte-identical files. Each saver returns the
path it wrote.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_SAVE_KW = {"dpi": 120, "metadata": {"Software": "cablesim"}}
_FIGSIZE = (8.0, 5.0)


def _finish(fig, path) -> str:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)
    return str(out)


def _curve_axes(title: str):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.set_title(title)
    ax.set_xlabel("removed submarine capacity (fraction)")
    ax.set_ylabel("disconnected nodes (fraction)")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _draw_threshold(ax, threshold: float | None):
    if threshold is not None:
        ax.axhline(threshold, color="0.4", linewidth=1.0, linestyle="--",
                   label=f"threshold {threshold:g}")


def save_curve_figure(curve, path, threshold: float | None = None,
                      title: str = "Disconnection curve") -> str:
    """Mean curve with a one-standard-deviation band."""
    fig, ax = _curve_axes(title)
    ps = curve.ps
    ax.plot(ps, curve.means, color="C0", label="mean")
    ax.fill_between(ps, [m - s for m, s in zip(curve.means, curve.stds)],
                    [m + s for m, s in zip(curve.means, curve.stds)],
                    color="C0", alpha=0.25, linewidth=0, label="±1 sd")
    _draw_threshold(ax, threshold)
    ax.legend(loc="upper left")
    return _finish(fig, path)


def save_attack_figure(curves: dict, path, threshold: float | None = None,
                       title: str = "Removal strategies compared") -> str:
    fig, ax = _curve_axes(title)
    for i, (name, curve) in enumerate(sorted(curves.items())):
        ax.plot(curve.ps, curve.means, color=f"C{i}", label=name)
    _draw_threshold(ax, threshold)
    ax.legend(loc="upper left")
    return _finish(fig, path)


def save_evolution_figure(rows, path,
                          title: str = "Critical point over time") -> str:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.set_title(title)
    ax.set_xlabel("snapshot")
    ax.set_ylabel("critical removal fraction")
    labels = [row["label"] for row in rows]
    values = [row["p_c"] for row in rows]
    xs = range(len(labels))
    kept = [(x, v) for x, v in zip(xs, values) if v is not None]
    if kept:
        ax.plot([x for x, _ in kept], [v for _, v in kept],
                marker="o", color="C0")
    missing = [x for x, v in zip(xs, values) if v is None]
    for x in missing:
        ax.axvline(x, color="C3", alpha=0.3, linewidth=1.0)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _finish(fig, path)


def save_tor_bounds_figure(rows, path, threshold: float | None = None,
                           title: str = "Overlay placement scenarios") -> str:
    fig, ax = _curve_axes(title)
    for i, row in enumerate(rows):
        label = row["scenario"]
        if row["p_c"] is not None:
            label += f" (p_c={row['p_c']:.2f})"
        ax.plot(row["curve"].ps, row["curve"].means, color=f"C{i}", label=label)
    _draw_threshold(ax, threshold)
    ax.legend(loc="upper left", fontsize=9)
    return _finish(fig, path)


def save_four_layer_figure(comparison: dict, path,
                           threshold: float | None = None,
                           title: str = "Three versus four layers") -> str:
    fig, ax = _curve_axes(title)
    three = comparison["three_curve"]
    four = comparison["four_curve"]
    ax.plot(three.ps, three.means, color="C0", label="three layers")
    ax.plot(four.ps, four.means, color="C1", label="four layers")
    _draw_threshold(ax, threshold)
    share = comparison.get("tor_share")
    if share is not None:
        ax.set_title(f"{title} (overlay share {share:.0%})")
    ax.legend(loc="upper left")
    return _finish(fig, path)


def save_cw_sweep_figure(rows, path,
                         title: str = "Relay failure threshold sweep") -> str:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.set_title(title)
    ax.set_xlabel("relay capacity threshold")
    ax.set_ylabel("critical removal fraction")
    xs = [row["cw_threshold"] for row in rows]
    ys = [row["p_c"] for row in rows]
    kept = [(x, y) for x, y in zip(xs, ys) if y is not None]
    if kept:
        ax.plot([x for x, _ in kept], [y for _, y in kept],
                marker="s", color="C0")
    for x, y in zip(xs, ys):
        if y is None:
            ax.axvline(x, color="C3", alpha=0.3)
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def save_sensitivity_figure(pairs, path,
                            title: str = "Disconnection threshold sweep") -> str:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.set_title(title)
    ax.set_xlabel("disconnection threshold")
    ax.set_ylabel("critical removal fraction")
    xs = [t for t, _ in pairs]
    ys = [est.p_c for _, est in pairs]
    kept = [(x, y) for x, y in zip(xs, ys) if y is not None]
    if kept:
        ax.plot([x for x, _ in kept], [y for _, y in kept],
                marker="o", color="C0")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def save_impact_figure(report, path,
                       title: str = "Census impact around events") -> str:
    """Per-event relative census change, with the small-impact band."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.set_title(title)
    ax.set_xlabel("event")
    ax.set_ylabel("relative census change")
    impacts = sorted(report.impacts, key=lambda i: (i.date, i.event_id))
    xs = range(len(impacts))
    ax.bar(xs, [i.impact for i in impacts], color="C0")
    ax.axhspan(-report.threshold, report.threshold, color="0.8", alpha=0.4,
               label=f"|impact| < {report.threshold:g}")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([i.event_id for i in impacts], rotation=90, fontsize=6)
    ax.legend(loc="upper right")
    fig.tight_layout()
    return _finish(fig, path)


__all__ = [
    "save_attack_figure", "save_curve_figure", "save_cw_sweep_figure",
    "save_evolution_figure", "save_four_layer_figure", "save_impact_figure",
    "save_sensitivity_figure", "save_tor_bounds_figure",
]
