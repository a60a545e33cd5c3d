"""Result tables: accuracy per grouping, per system, with significance bolding.

A table row is one grouping (category, tense group, verb type, or
phenomenon); columns are the evaluated count and one column per system in
lexicographic order. Cells are half-up 1-decimal percentages; cells with
nothing evaluated render as an em dash. Bolding marks the significance
cluster of the best systems and is suppressed when the whole row is one
cluster or when the analysis mode makes comparisons non-commensurable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from .analysis import (
    AccuracyCell,
    AnalysisMode,
    SignificanceConfig,
    category_key_map,
    filter_analysis1,
    filter_analysis2,
    non_weighted_exact,
    phenomenon_cells,
    render_percent,
    render_percent_fraction,
    tense_key_map,
    top_cluster,
    verb_type_key_map,
    weighted_exact,
    aggregate,
)
from .model import JudgmentSet
from .store import Suite

UNDEFINED_CELL = "—"  # em dash, distinguishes "nothing evaluated" from 0.0%

GROUPINGS = ("category", "tense", "verbtype", "phenomenon")
DEFAULT_MIN_N = 15


@dataclass(frozen=True)
class Cell:
    text: str
    bold: bool = False


@dataclass(frozen=True)
class Row:
    label: str
    n: str
    cells: tuple[Cell, ...]
    kind: str = "data"  # data | sum | average


@dataclass
class Table:
    title: str
    systems: list[str]
    rows: list[Row] = field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        return ["", "n", *self.systems]


@dataclass
class AnalysisTables:
    """Computed per-system cells for one analysis mode, ready for rendering."""

    mode: str  # "analysis1" | "analysis2"
    systems: list[str]
    cells_by_phenomenon: dict[str, dict[str, AccuracyCell]]  # phenomenon -> system -> cell
    suite: Suite


def compute_analysis(
    suite: Suite,
    judgment_sets: Mapping[str, JudgmentSet],
    mode: str | AnalysisMode,
    excluded: tuple[str, ...] = (),
) -> AnalysisTables:
    """Filter judgments per the analysis mode and count per phenomenon."""
    if isinstance(mode, str):
        mode = AnalysisMode(mode, tuple(excluded))
    unknown = set(mode.excluded_systems) - set(judgment_sets)
    if unknown:
        raise ValueError(f"excluded systems not in run: {sorted(unknown)}")
    excluded = mode.excluded_systems
    mode = mode.mode
    systems = [s for s in sorted(judgment_sets) if s not in set(excluded)]
    items_by_id = suite.items_by_id()
    per_system: dict[str, list[AccuracyCell]] = {}
    if mode == "analysis1":
        common = filter_analysis1(judgment_sets, excluded)
        for system in systems:
            per_system[system] = phenomenon_cells(judgment_sets[system], common, items_by_id)
    else:
        for system in systems:
            retained = filter_analysis2(judgment_sets[system])
            per_system[system] = phenomenon_cells(judgment_sets[system], retained, items_by_id)
    by_phenomenon: dict[str, dict[str, AccuracyCell]] = {}
    for system, cells in per_system.items():
        for cell in cells:
            by_phenomenon.setdefault(cell.key, {})[system] = cell
    return AnalysisTables(mode=mode, systems=systems, cells_by_phenomenon=by_phenomenon, suite=suite)


def _grouped_cells(
    analysis: AnalysisTables, grouping: str
) -> dict[str, dict[str, AccuracyCell]]:
    """Cells regrouped by the requested key; phenomenon is the identity."""
    if grouping == "phenomenon":
        return analysis.cells_by_phenomenon
    taxonomy = analysis.suite.taxonomy
    if grouping == "category":
        key_of = category_key_map(taxonomy)
    elif grouping == "tense":
        key_of = tense_key_map(taxonomy)
    elif grouping == "verbtype":
        key_of = verb_type_key_map(taxonomy)
    else:
        raise ValueError(f"unknown grouping {grouping!r}")
    flat = [
        cell
        for by_system in analysis.cells_by_phenomenon.values()
        for cell in by_system.values()
    ]
    grouped: dict[str, dict[str, AccuracyCell]] = {}
    for cell in aggregate(flat, key_of):
        grouped.setdefault(cell.key, {})[cell.system] = cell
    return grouped


def _row_order(analysis: AnalysisTables, grouping: str, keys: set[str]) -> list[str]:
    if grouping == "category":
        order = [c.id for c in analysis.suite.taxonomy.categories]
        return [k for k in order if k in keys]
    return sorted(keys)


def _row_label(analysis: AnalysisTables, grouping: str, key: str) -> str:
    taxonomy = analysis.suite.taxonomy
    if grouping == "category":
        return taxonomy.category(key).name
    if grouping == "phenomenon":
        phenomenon = taxonomy.phenomena.get(key)
        return phenomenon.name if phenomenon else key
    return key


def _bold_systems(
    row_cells: Mapping[str, AccuracyCell],
    analysis_mode: str,
    config: SignificanceConfig,
) -> set[str]:
    """Cluster members to bold; empty when bolding is suppressed."""
    if analysis_mode != "analysis1":
        return set()
    cells = list(row_cells.values())
    cluster = top_cluster(cells, config)
    scored = {c.system for c in cells if c.evaluated > 0}
    if cluster >= scored:
        return set()
    return cluster


def _data_row(
    label: str,
    systems: list[str],
    row_cells: Mapping[str, AccuracyCell],
    bold: set[str],
    shared_n: bool,
) -> Row:
    cells = []
    for system in systems:
        cell = row_cells.get(system)
        if cell is None or cell.evaluated == 0:
            cells.append(Cell(UNDEFINED_CELL))
        else:
            cells.append(Cell(render_percent(cell.correct, cell.evaluated), system in bold))
    if shared_n:
        n_values = {c.evaluated for c in row_cells.values()}
        n_text = str(n_values.pop()) if len(n_values) == 1 else UNDEFINED_CELL
    else:
        n_text = UNDEFINED_CELL
    return Row(label=label, n=n_text, cells=tuple(cells))


def _summary_rows(
    systems: list[str],
    grouped: dict[str, dict[str, AccuracyCell]],
    shared_n: bool,
) -> list[Row]:
    """Sum (total correct), non-weighted, and weighted average rows."""
    sum_cells, nw_cells, w_cells = [], [], []
    total_n = None
    if shared_n:
        totals = set()
        for system in systems:
            totals.add(sum(g[system].evaluated for g in grouped.values() if system in g))
        if len(totals) == 1:
            total_n = totals.pop()
    for system in systems:
        cells = [g[system] for g in grouped.values() if system in g and g[system].evaluated > 0]
        if not cells:
            sum_cells.append(Cell(UNDEFINED_CELL))
            nw_cells.append(Cell(UNDEFINED_CELL))
            w_cells.append(Cell(UNDEFINED_CELL))
            continue
        total_correct = sum(c.correct for c in cells)
        sum_cells.append(Cell(str(total_correct)))
        nw_cells.append(Cell(render_percent_fraction(non_weighted_exact(cells))))
        w_cells.append(Cell(render_percent_fraction(weighted_exact(cells))))
    n_text = str(total_n) if total_n is not None else UNDEFINED_CELL
    return [
        Row("Sum", n_text, tuple(sum_cells), kind="sum"),
        Row("Non-weighted average", UNDEFINED_CELL, tuple(nw_cells), kind="average"),
        Row("Weighted average", UNDEFINED_CELL, tuple(w_cells), kind="average"),
    ]


def category_table(
    analysis: AnalysisTables,
    config: SignificanceConfig = SignificanceConfig(),
) -> Table:
    """Rows = categories with data, plus Sum and both average rows."""
    grouped = _grouped_cells(analysis, "category")
    shared_n = analysis.mode == "analysis1"
    title = "Accuracy (%) per category, " + (
        "analysis 1" if analysis.mode == "analysis1" else "analysis 2"
    )
    table = Table(title=title, systems=analysis.systems)
    for key in _row_order(analysis, "category", set(grouped)):
        bold = _bold_systems(grouped[key], analysis.mode, config)
        table.rows.append(
            _data_row(_row_label(analysis, "category", key), analysis.systems, grouped[key], bold, shared_n)
        )
    table.rows.extend(_summary_rows(analysis.systems, grouped, shared_n))
    return table


def group_table(
    analysis: AnalysisTables,
    grouping: str,
    min_n: int = DEFAULT_MIN_N,
    config: SignificanceConfig = SignificanceConfig(),
) -> Table:
    """Tense, verb-type, or phenomenon table.

    The phenomenon table keeps only rows whose evaluated count reaches
    ``min_n`` and carries no summary rows.
    """
    if grouping == "category":
        return category_table(analysis, config)
    if grouping not in GROUPINGS:
        raise ValueError(f"unknown grouping {grouping!r}")
    grouped = _grouped_cells(analysis, grouping)
    shared_n = analysis.mode == "analysis1"
    if grouping == "phenomenon":
        grouped = {
            key: by_system
            for key, by_system in grouped.items()
            if max(c.evaluated for c in by_system.values()) >= min_n
        }
    titles = {
        "tense": "Accuracy (%) per tense group",
        "verbtype": "Accuracy (%) per verb type",
        "phenomenon": f"Accuracy (%) per phenomenon (n ≥ {min_n})",
    }
    table = Table(title=titles[grouping], systems=analysis.systems)
    for key in _row_order(analysis, grouping, set(grouped)):
        bold = _bold_systems(grouped[key], analysis.mode, config)
        table.rows.append(
            _data_row(_row_label(analysis, grouping, key), analysis.systems, grouped[key], bold, shared_n)
        )
    if grouping in ("tense", "verbtype"):
        table.rows.extend(_summary_rows(analysis.systems, grouped, shared_n))
    return table


def to_markdown(table: Table) -> str:
    lines = [f"## {table.title}", ""]
    lines.append("| " + " | ".join(table.columns) + " |")
    lines.append("|" + "---|" * len(table.columns))
    for row in table.rows:
        rendered = [row.label, row.n]
        for cell in row.cells:
            rendered.append(f"**{cell.text}**" if cell.bold else cell.text)
        lines.append("| " + " | ".join(rendered) + " |")
    return "\n".join(lines) + "\n"


def to_tsv(table: Table) -> str:
    lines = ["\t".join(table.columns)]
    for row in table.rows:
        lines.append("\t".join([row.label, row.n, *[c.text for c in row.cells]]))
    return "\n".join(lines) + "\n"


def to_records(table: Table) -> str:
    lines = [json.dumps({"schema": "table@1", "title": table.title, "systems": table.systems})]
    for row in table.rows:
        lines.append(
            json.dumps(
                {
                    "label": row.label,
                    "n": row.n,
                    "kind": row.kind,
                    "cells": [{"text": c.text, "bold": c.bold} for c in row.cells],
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + "\n"


def parse_records(text: str) -> Table:
    lines = [line for line in text.splitlines() if line.strip()]
    header = json.loads(lines[0])
    if header.get("schema") != "table@1":
        raise ValueError(f"unsupported table schema {header.get('schema')!r}")
    table = Table(title=header["title"], systems=list(header["systems"]))
    for line in lines[1:]:
        record = json.loads(line)
        table.rows.append(
            Row(
                label=record["label"],
                n=record["n"],
                cells=tuple(Cell(c["text"], c["bold"]) for c in record["cells"]),
                kind=record["kind"],
            )
        )
    return table


RENDERERS = {"md": to_markdown, "markdown": to_markdown, "tsv": to_tsv, "records": to_records}


def render(table: Table, fmt: str) -> str:
    try:
        renderer = RENDERERS[fmt]
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}") from None
    return renderer(table)
