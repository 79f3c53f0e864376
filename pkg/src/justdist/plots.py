"""Figure rendering for audit and frontier reports.

Charts are written next to the delimited/JSON outputs; the Agg backend
keeps rendering headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_profile_chart(report: Mapping, path: str | Path) -> None:
    """Bar chart of expected utility per relevant group."""
    rows = report["profile"]
    labels = [
        f"{r['group']}" if r["stratum"] == "all" else f"{r['group']} | {r['stratum']}"
        for r in rows
    ]
    values = [r["expected_utility"] for r in rows]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(rows) + 1.5), 3.2))
    bars = ax.bar(range(len(rows)), values, color="#4878a8", width=0.6)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylabel("expected utility")
    ax.set_title("expected utility per relevant group")
    for bar, v in zip(bars, values):
        ax.annotate(
            f"{v:.3g}",
            (bar.get_x() + bar.get_width() / 2, v),
            ha="center",
            va="bottom" if v >= 0 else "top",
            fontsize=8,
        )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_gaps_chart(report: Mapping, path: str | Path) -> None:
    """Bar chart of classical rate gaps, undefined criteria omitted."""
    rows = [c for c in report["classical"] if "undefined" not in c]
    if not rows:
        return
    labels = [c["criterion"] for c in rows]
    values = [c["overall"] for c in rows]
    fig, ax = plt.subplots(figsize=(7.0, 0.45 * len(rows) + 1.6))
    ax.barh(range(len(rows)), values, color="#a85448", height=0.6)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("rate gap")
    ax.set_title("classical criterion gaps")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_frontier_chart(frontier_rows: Iterable[Mapping], path: str | Path) -> None:
    """Scatter of the utility/equality frontier, extremes annotated."""
    rows = list(frontier_rows)
    gaps = [r["egalitarian_gap"] for r in rows]
    totals = [r["total_utility"] for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(gaps, totals, "-", color="#b0b0b0", linewidth=1.0, zorder=1)
    ax.scatter(gaps, totals, color="#4878a8", s=28, zorder=2)
    if rows:
        lo = rows[0]
        hi = max(rows, key=lambda r: r["total_utility"])
        ax.annotate(
            f"min gap {lo['egalitarian_gap']:.3g}",
            (lo["egalitarian_gap"], lo["total_utility"]),
            textcoords="offset points",
            xytext=(6, 6),
            fontsize=8,
        )
        ax.annotate(
            f"max total {hi['total_utility']:.3g}",
            (hi["egalitarian_gap"], hi["total_utility"]),
            textcoords="offset points",
            xytext=(6, -10),
            fontsize=8,
        )
    ax.set_xlabel("egalitarian gap")
    ax.set_ylabel("total utility per record")
    ax.set_title("equality / welfare frontier")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
