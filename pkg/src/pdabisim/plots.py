"""Figures for the demo run: rule growth and cap versus explored positions."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.figsize": (4.5, 3.0),
}


def rule_growth(counts: dict, path: Path) -> Path:
    """``counts``: label -> list of (n, rules)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, pts in counts.items():
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", label=label)
        ax.set_xlabel("n")
        ax.set_ylabel("emitted rules")
        ax.set_title("Rule count at k = 1")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def cap_vs_explored(runs: dict, path: Path) -> Path:
    """``runs``: label -> list of (cap, explored configurations, game positions)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, hist in runs.items():
            caps = [h[0] for h in hist]
            ax.plot(caps, [max(h[1] + h[2], 1) for h in hist], marker="o", label=label)
        ax.set_yscale("log")
        ax.set_xlabel("stack cap")
        ax.set_ylabel("configurations + game positions")
        ax.set_title("Work per cap")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
