"""Domain model: test items, rule sets, system outputs, and judgments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .taxonomy import Taxonomy

PASS = "pass"
FAIL = "fail"
WARNING = "warning"
VERDICTS = (PASS, FAIL, WARNING)

# Causes, constrained per verdict.
CAUSES_BY_VERDICT = {
    PASS: frozenset({"positive-match", "exact-match", "human-decision"}),
    FAIL: frozenset({"negative-match", "human-decision"}),
    WARNING: frozenset({"no-match", "conflict", "empty-output"}),
}

AUTOMATIC = "automatic"
HUMAN = "human"


@dataclass(frozen=True)
class Pattern:
    """One hand-crafted rule expression with provenance."""

    expression: str
    case_insensitive: bool = False
    author: str | None = None
    created_at: str | None = None

    def __post_init__(self):
        if not self.expression:
            raise ValueError("pattern expression must be non-empty")


@dataclass
class RuleSet:
    """Ordered positive/negative pattern lists plus exact valid translations.

    Exact translations are stored in normalized form so that containment
    checks against normalized MT output are plain string equality.
    """

    positive: list[Pattern] = field(default_factory=list)
    negative: list[Pattern] = field(default_factory=list)
    exact_valid: list[str] = field(default_factory=list)

    def __post_init__(self):
        from .matcher import normalize

        self.exact_valid = [normalize(sentence) for sentence in self.exact_valid]

    def add_exact(self, sentence: str) -> None:
        from .matcher import normalize

        self.exact_valid.append(normalize(sentence))

    def is_empty(self) -> bool:
        return not (self.positive or self.negative or self.exact_valid)

    def copy(self) -> "RuleSet":
        return RuleSet(list(self.positive), list(self.negative), list(self.exact_valid))


@dataclass(frozen=True)
class TestItem:
    """One source sentence probing exactly one phenomenon."""

    id: str
    source: str
    phenomenon: str
    rules: RuleSet
    note: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("item id must be non-empty")
        if not self.source:
            raise ValueError(f"item {self.id!r}: source must be non-empty")


@dataclass(frozen=True)
class SystemOutput:
    """One system's translation of one test item (possibly empty)."""

    system: str
    item: str
    text: str


@dataclass(frozen=True)
class Judgment:
    """Verdict for one (system, item) pair with matched-rule provenance."""

    system: str
    item: str
    verdict: str
    cause: str
    matched_rule: Pattern | None = None
    decided_by: str = AUTOMATIC

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.cause not in CAUSES_BY_VERDICT[self.verdict]:
            raise ValueError(
                f"cause {self.cause!r} not allowed for verdict {self.verdict!r}"
            )
        if self.decided_by not in (AUTOMATIC, HUMAN):
            raise ValueError(f"unknown decided_by {self.decided_by!r}")
        if self.decided_by == HUMAN and self.cause != "human-decision":
            raise ValueError("human judgments must carry cause 'human-decision'")


@dataclass
class JudgmentSet:
    """All judgments of one system over a suite, keyed by item id."""

    system: str
    judgments: dict[str, Judgment] = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, WARNING: 0}
        for judgment in self.judgments.values():
            out[judgment.verdict] += 1
        return out

    def warning_rate(self) -> float:
        if not self.judgments:
            return 0.0
        return self.counts()[WARNING] / len(self.judgments)

    def __len__(self) -> int:
        return len(self.judgments)


@dataclass(frozen=True)
class Finding:
    """One validation problem; severity 'error' findings make a suite not ok."""

    code: str
    message: str
    item_id: str | None = None
    severity: str = "error"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]


def validate_suite(items: Iterable[TestItem], taxonomy: Taxonomy) -> ValidationReport:
    """Check a suite for duplicate ids, empty rule sets, bad patterns, and
    unknown phenomenon ids. The report is ok iff no errors were found."""
    from .matcher import PatternError, compile_pattern

    report = ValidationReport()
    seen: set[str] = set()
    for item in items:
        if item.id in seen:
            report.findings.append(
                Finding("duplicate-id", f"duplicate item id {item.id!r}", item.id)
            )
        seen.add(item.id)
        if item.phenomenon not in taxonomy.phenomena:
            report.findings.append(
                Finding(
                    "unknown-phenomenon",
                    f"item {item.id!r} references unknown phenomenon {item.phenomenon!r}",
                    item.id,
                )
            )
        if item.rules.is_empty():
            report.findings.append(
                Finding("empty-rules", f"item {item.id!r} has no rules", item.id)
            )
        for pattern in item.rules.positive + item.rules.negative:
            try:
                compile_pattern(pattern.expression, pattern.case_insensitive)
            except PatternError as exc:
                report.findings.append(
                    Finding(
                        "bad-pattern",
                        f"item {item.id!r}: pattern {pattern.expression!r} does not compile: {exc.reason}",
                        item.id,
                    )
                )
    return report
