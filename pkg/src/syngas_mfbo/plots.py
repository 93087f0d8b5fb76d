"""Report figures rendered to files next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

SOURCE_COLORS = ("#c0392b", "#2980b9", "#27ae60", "#8e44ad")


def campaign_figure(rows: list, path: Path) -> Path:
    """Evaluation trace and budget curve for one campaign history."""
    fig, (ax_val, ax_budget) = plt.subplots(2, 1, sharex=True, figsize=(7.2, 5.4))
    steps = [r["step"] for r in rows]
    for source in sorted({r["source"] for r in rows}):
        sub = [r for r in rows if r["source"] == source]
        ax_val.scatter(
            [r["step"] for r in sub], [r["value"] for r in sub],
            s=22, color=SOURCE_COLORS[source % len(SOURCE_COLORS)],
            label=f"source {source}",
        )
    inc_steps = [r["step"] for r in rows if r["incumbent"] is not None]
    inc_vals = [r["incumbent"] for r in rows if r["incumbent"] is not None]
    if inc_vals:
        ax_val.step(inc_steps, inc_vals, where="post", color="black", lw=1.2, label="incumbent")
    ax_val.set_ylabel("objective")
    ax_val.legend(loc="best", fontsize=8)
    ax_budget.step(steps, [r["budget"] for r in rows], where="post", color="#555555")
    ax_budget.set_xlabel("evaluation")
    ax_budget.set_ylabel("budget spent")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def study_figure(rows: list, regression, path: Path) -> Path:
    """Budget spent versus low fidelity cost with the fitted line."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    xs = [row.cost for row in rows]
    ys = [row.budget_spent for row in rows]
    ax.scatter(xs, ys, s=26, color="#2980b9", alpha=0.75, label="campaign")
    grid = sorted(set(xs))
    line = [regression.slope * x + regression.intercept for x in grid]
    ax.plot(grid, line, color="#c0392b", lw=1.5, label="least squares")
    ax.set_xlabel("low fidelity cost")
    ax.set_ylabel("acquisition budget spent")
    ax.set_title(
        f"slope={regression.slope:.3g}  r={regression.r:.3f}  p={regression.p_value:.3g}"
    )
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)
