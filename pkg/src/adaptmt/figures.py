"""Figure rendering for score, stream and learning-curve reports.

All figures are written straight to files (Agg backend, no display) next
to the delimited outputs they illustrate.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from adaptmt.corpus import DomainTag
from adaptmt.scheduler import BatchWeightingSchedule, r_out
from adaptmt.selection import ScoredSentence

FIGSIZE = (8.0, 4.5)


def _save(fig, path: str | Path) -> None:
    fig.tight_layout()
    # Strip the version-bearing Software tag so artifact bytes stay stable.
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)


def save_score_figure(scored: Sequence[ScoredSentence], selected_count: int,
                      path: str | Path) -> None:
    """Sorted score curve plus score histogram, with the selection cutoff."""
    values = sorted(s.ced for s in scored)
    fig, (left, right) = plt.subplots(1, 2, figsize=FIGSIZE)

    left.plot(range(len(values)), values, lw=1.0, color="tab:blue")
    if 0 < selected_count <= len(values):
        left.axvline(selected_count - 0.5, color="tab:red", ls="--", lw=1.0,
                     label=f"selected: {selected_count}")
        left.legend(loc="upper left", fontsize=8)
    left.set_xlabel("rank")
    left.set_ylabel("cross-entropy difference")
    left.set_title("sorted scores")
    left.grid(alpha=0.3)

    right.hist(values, bins=min(60, max(10, len(values) // 20)), color="tab:blue")
    if 0 < selected_count <= len(values):
        right.axvline(values[selected_count - 1], color="tab:red", ls="--", lw=1.0)
    right.set_xlabel("cross-entropy difference")
    right.set_ylabel("sentences")
    right.set_title("score distribution")
    right.grid(alpha=0.3)

    _save(fig, path)


def save_stream_figure(origins: Sequence[DomainTag], schedule: BatchWeightingSchedule,
                       path: str | Path) -> None:
    """Running out-of-domain batch fraction against the scheduled ratio."""
    target = r_out(schedule)
    running = []
    out_seen = 0
    for i, origin in enumerate(origins, start=1):
        if origin is DomainTag.OUT_OF_DOMAIN:
            out_seen += 1
        running.append(out_seen / i)

    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(range(1, len(running) + 1), running, lw=1.0, color="tab:blue",
            label="running out-of-domain fraction")
    ax.axhline(target, color="tab:red", ls="--", lw=1.0,
               label=f"scheduled ratio {target:.4f}")
    ax.set_xlabel("batch ordinal")
    ax.set_ylabel("out-of-domain fraction")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(f"batch stream composition (n_in={schedule.n_in}, n_out={schedule.n_out})")
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)


def save_curve_figure(records: Sequence[tuple[int, str, float, str]],
                      path: str | Path) -> None:
    """Step-vs-value lines, one per metric, from curve-log records."""
    by_metric: dict[str, list[tuple[int, float]]] = {}
    for step, metric, value, _ in records:
        by_metric.setdefault(metric, []).append((step, value))

    fig, ax = plt.subplots(figsize=FIGSIZE)
    for metric in sorted(by_metric):
        points = by_metric[metric]
        ax.plot([p[0] for p in points], [p[1] for p in points],
                marker="o", ms=3, lw=1.0, label=metric)
    ax.set_xlabel("step")
    ax.set_ylabel("value")
    ax.set_title("learning curve")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    _save(fig, path)
