"""Accuracy computation, warning-aware filtering, averages, and the
two-proportion significance machinery behind system comparisons.

Accuracy for a grouping is correct/evaluated where a pass counts as
correct, a fail as incorrect, and warnings are removed beforehand by one
of the two filters:

* analysis 1 keeps only items that no included system warned on, so every
  system is compared on the same segments;
* analysis 2 drops each system's own warnings, retaining more segments at
  the cost of comparability.

Comparisons use a pooled two-sample z statistic,
z = (p1 - p2) / sqrt(p(1-p)(1/n1 + 1/n2)) with p = (c1+c2)/(n1+n2),
two-sided. The "top cluster" of a grouping is the best system plus every
system whose difference from it is not significant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Mapping

from .model import PASS, WARNING, JudgmentSet, TestItem
from .taxonomy import Taxonomy

#: Two-sided critical value for a 95% confidence comparison.
DEFAULT_CRITICAL_Z = 1.959964


class EmptyAnalysisError(ValueError):
    """No items survive the filter; downstream accuracies would divide by zero."""


@dataclass(frozen=True)
class SignificanceConfig:
    critical_z: float = DEFAULT_CRITICAL_Z
    # "best": membership tested pairwise against the best system only.
    basis: str = "best"

    def __post_init__(self):
        if self.critical_z <= 0:
            raise ValueError("critical z must be positive")


@dataclass(frozen=True)
class ZResult:
    z: float
    significant: bool


@dataclass(frozen=True)
class AccuracyCell:
    """Correct/evaluated counts for one (system, grouping key) pair."""

    system: str
    key: str
    correct: int
    evaluated: int
    in_top_cluster: bool = False

    def __post_init__(self):
        if not 0 <= self.correct <= self.evaluated:
            raise ValueError(
                f"cell {self.system}/{self.key}: correct={self.correct} "
                f"outside [0, {self.evaluated}]"
            )

    @property
    def accuracy(self) -> float | None:
        if self.evaluated == 0:
            return None
        return self.correct / self.evaluated

    def fraction(self) -> Fraction | None:
        if self.evaluated == 0:
            return None
        return Fraction(self.correct, self.evaluated)


@dataclass(frozen=True)
class AnalysisMode:
    mode: str  # "analysis1" | "analysis2"
    excluded_systems: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in ("analysis1", "analysis2"):
            raise ValueError(f"unknown analysis mode {self.mode!r}")


def accuracy(correct: int, evaluated: int) -> float:
    """Plain correct/evaluated fraction; evaluated must be positive."""
    if evaluated <= 0:
        raise ValueError("accuracy undefined for evaluated <= 0")
    if not 0 <= correct <= evaluated:
        raise ValueError("correct must be within [0, evaluated]")
    return correct / evaluated


def render_percent(correct: int, evaluated: int) -> str:
    """Accuracy as a percentage string with half-up 1-decimal rounding."""
    return render_percent_fraction(Fraction(correct, evaluated))


def render_percent_fraction(value: Fraction) -> str:
    quantized = (Decimal(value.numerator) * 100 / Decimal(value.denominator)).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_UP
    )
    return str(quantized)


def filter_analysis1(
    judgment_sets: Mapping[str, JudgmentSet],
    excluded: Iterable[str] = (),
) -> list[str]:
    """Item ids with no warning from any included system, sorted.

    Excluded systems neither veto items nor take part in the comparison.
    """
    excluded = set(excluded)
    included = [s for s in sorted(judgment_sets) if s not in excluded]
    if not included:
        raise EmptyAnalysisError("no systems left after exclusions")
    first = judgment_sets[included[0]]
    retained = []
    for item_id in first.judgments:
        if all(
            judgment_sets[s].judgments[item_id].verdict != WARNING for s in included
        ):
            retained.append(item_id)
    if not retained:
        raise EmptyAnalysisError("every item carries a warning for some included system")
    return sorted(retained)


def filter_analysis2(judgment_set: JudgmentSet) -> list[str]:
    """Item ids this one system did not warn on, sorted."""
    return sorted(
        item_id
        for item_id, judgment in judgment_set.judgments.items()
        if judgment.verdict != WARNING
    )


def phenomenon_cells(
    judgment_set: JudgmentSet,
    item_ids: Iterable[str],
    items_by_id: Mapping[str, TestItem],
) -> list[AccuracyCell]:
    """Per-phenomenon counts for one system over an already-filtered item set."""
    correct: dict[str, int] = {}
    evaluated: dict[str, int] = {}
    for item_id in item_ids:
        phenomenon = items_by_id[item_id].phenomenon
        verdict = judgment_set.judgments[item_id].verdict
        if verdict == WARNING:
            continue
        evaluated[phenomenon] = evaluated.get(phenomenon, 0) + 1
        if verdict == PASS:
            correct[phenomenon] = correct.get(phenomenon, 0) + 1
    return [
        AccuracyCell(judgment_set.system, key, correct.get(key, 0), evaluated[key])
        for key in sorted(evaluated)
    ]


def aggregate(
    cells: Iterable[AccuracyCell], key_of: Mapping[str, str]
) -> list[AccuracyCell]:
    """Sum correct/evaluated over member phenomena into coarser groups.

    ``key_of`` maps a phenomenon id to its group key; phenomena without a
    mapping are dropped (e.g. untagged phenomena in a tense table).
    """
    totals: dict[tuple[str, str], list[int]] = {}
    for cell in cells:
        group = key_of.get(cell.key)
        if group is None:
            continue
        bucket = totals.setdefault((cell.system, group), [0, 0])
        bucket[0] += cell.correct
        bucket[1] += cell.evaluated
    return [
        AccuracyCell(system, group, c, n)
        for (system, group), (c, n) in sorted(totals.items())
    ]


def category_key_map(taxonomy: Taxonomy) -> dict[str, str]:
    return {p.id: p.category for p in taxonomy.phenomena.values()}


def tense_key_map(taxonomy: Taxonomy) -> dict[str, str]:
    return {
        p.id: p.tense_group
        for p in taxonomy.phenomena.values()
        if p.tense_group is not None
    }


def verb_type_key_map(taxonomy: Taxonomy) -> dict[str, str]:
    return {
        p.id: p.verb_type_group
        for p in taxonomy.phenomena.values()
        if p.verb_type_group is not None
    }


def non_weighted_exact(cells: Iterable[AccuracyCell]) -> Fraction:
    """Total correct over total evaluated across groupings."""
    total_correct = 0
    total_evaluated = 0
    for cell in cells:
        total_correct += cell.correct
        total_evaluated += cell.evaluated
    if total_evaluated == 0:
        raise ValueError("no evaluated items")
    return Fraction(total_correct, total_evaluated)


def non_weighted_average(cells: Iterable[AccuracyCell]) -> float:
    return float(non_weighted_exact(cells))


def weighted_exact(cells: Iterable[AccuracyCell]) -> Fraction:
    """Arithmetic mean of the per-grouping accuracies.

    Each grouping counts equally regardless of its size; groupings with no
    evaluated items are skipped.
    """
    fractions = [cell.fraction() for cell in cells]
    fractions = [f for f in fractions if f is not None]
    if not fractions:
        raise ValueError("no evaluated items")
    return sum(fractions, Fraction(0)) / len(fractions)


def weighted_average(cells: Iterable[AccuracyCell]) -> float:
    return float(weighted_exact(cells))


def z_test(
    correct1: int,
    n1: int,
    correct2: int,
    n2: int,
    config: SignificanceConfig = SignificanceConfig(),
) -> ZResult:
    """Pooled two-proportion z statistic and its two-sided significance.

    When the pooled proportion is 0 or 1 both samples are identical in
    rate; the difference is defined as z=0 and never significant.
    """
    if n1 <= 0 or n2 <= 0:
        raise ValueError("sample sizes must be positive")
    pooled = (correct1 + correct2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        return ZResult(0.0, False)
    p1 = correct1 / n1
    p2 = correct2 / n2
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    z = (p1 - p2) / se
    return ZResult(z, abs(z) > config.critical_z)


def top_cluster(
    cells: Iterable[AccuracyCell],
    config: SignificanceConfig = SignificanceConfig(),
) -> set[str]:
    """Systems not significantly below the best system on this grouping.

    Ties for best all act as the reference; the best system is always a
    member. Cells with no evaluated items never join the cluster.
    """
    scored = [cell for cell in cells if cell.evaluated > 0]
    if not scored:
        return set()
    best_fraction = max(cell.fraction() for cell in scored)
    best = [cell for cell in scored if cell.fraction() == best_fraction]
    cluster: set[str] = set()
    for cell in scored:
        for reference in best:
            result = z_test(
                reference.correct, reference.evaluated, cell.correct, cell.evaluated, config
            )
            if not result.significant:
                cluster.add(cell.system)
                break
    return cluster


def mark_top_cluster(
    cells: list[AccuracyCell],
    config: SignificanceConfig = SignificanceConfig(),
) -> list[AccuracyCell]:
    members = top_cluster(cells, config)
    return [replace(cell, in_top_cluster=cell.system in members) for cell in cells]


@dataclass
class SystemWarningStats:
    system: str
    pairs: int
    warnings_before: int
    warnings_after: int
    decided: int

    @property
    def rate_before(self) -> float:
        return self.warnings_before / self.pairs if self.pairs else 0.0

    @property
    def rate_after(self) -> float:
        return self.warnings_after / self.pairs if self.pairs else 0.0


@dataclass
class WarningStats:
    systems: list[SystemWarningStats] = field(default_factory=list)

    @property
    def validated_outputs(self) -> int:
        """Human-validated outputs: one per pass/fail decision in the log."""
        return sum(s.decided for s in self.systems)

    def for_system(self, system: str) -> SystemWarningStats:
        for stats in self.systems:
            if stats.system == system:
                return stats
        raise KeyError(system)


def warning_stats(
    before: Mapping[str, JudgmentSet],
    after: Mapping[str, JudgmentSet],
    decisions: Mapping[str, int] | None = None,
) -> WarningStats:
    """Per-system warning rates before and after triage-log replay."""
    decisions = decisions or {}
    stats = WarningStats()
    for system in sorted(before):
        base = before[system]
        effective = after[system]
        stats.systems.append(
            SystemWarningStats(
                system=system,
                pairs=len(base),
                warnings_before=base.counts()[WARNING],
                warnings_after=effective.counts()[WARNING],
                decided=decisions.get(system, 0),
            )
        )
    return stats
