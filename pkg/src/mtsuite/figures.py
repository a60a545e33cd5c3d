"""Figure rendering for report artifacts (PNG files next to the tables)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import WarningStats
from .report import Table

# Stripped so repeated runs produce byte-identical files.
_NO_METADATA = {"Software": None}


def save_table_heatmap(table: Table, path: str | Path) -> Path:
    """Accuracy heatmap of a rendered table: rows = groupings, cols = systems."""
    data_rows = [r for r in table.rows if r.kind == "data"]
    labels = [r.label for r in data_rows]
    matrix = []
    for row in data_rows:
        values = []
        for cell in row.cells:
            try:
                values.append(float(cell.text))
            except ValueError:
                values.append(float("nan"))
        matrix.append(values)

    fig, ax = plt.subplots(
        figsize=(1.0 + 0.62 * max(len(table.systems), 1), 1.2 + 0.4 * max(len(labels), 1))
    )
    image = ax.imshow(matrix, cmap="RdYlGn", vmin=0.0, vmax=100.0, aspect="auto")
    ax.set_xticks(range(len(table.systems)), table.systems, rotation=45, ha="right", fontsize=7)
    ax.set_yticks(range(len(labels)), labels, fontsize=7)
    for i, row in enumerate(data_rows):
        for j, cell in enumerate(row.cells):
            weight = "bold" if cell.bold else "normal"
            ax.text(j, i, cell.text, ha="center", va="center", fontsize=6, fontweight=weight)
    ax.set_title(table.title, fontsize=9)
    fig.colorbar(image, ax=ax, shrink=0.8, label="accuracy (%)")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150, metadata=_NO_METADATA)
    plt.close(fig)
    return path


def save_warning_rates(stats: WarningStats, path: str | Path) -> Path:
    """Per-system warning rates before and after triage, as grouped bars."""
    systems = [s.system for s in stats.systems]
    before = [100.0 * s.rate_before for s in stats.systems]
    after = [100.0 * s.rate_after for s in stats.systems]

    fig, ax = plt.subplots(figsize=(1.5 + 0.8 * max(len(systems), 1), 3.4))
    positions = range(len(systems))
    width = 0.38
    ax.bar([p - width / 2 for p in positions], before, width, label="before triage")
    ax.bar([p + width / 2 for p in positions], after, width, label="after triage")
    ax.set_xticks(list(positions), systems, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("warnings (%)")
    ax.set_title("Warning rate per system")
    ax.legend(fontsize=7)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150, metadata=_NO_METADATA)
    plt.close(fig)
    return path
