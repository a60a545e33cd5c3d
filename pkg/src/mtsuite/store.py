"""Plain-file persistence and the append-only annotation log.

Everything on disk is newline-delimited UTF-8 so suites, outputs, and
triage history stay diff-able and versionable:

* suite files: one JSON record per line after a schema header; item
  records carry {id, source, phenomenon, positive[], negative[], exact[]},
  and optional {"phenomenon": {...}} records extend the registry;
* output files: tab-separated ``item-id<TAB>text`` lines;
* log files: one annotation event per line after a schema header.

Effective state is never stored: it is always the deterministic fold
(replay) of the log over the imported base.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from . import matcher
from .model import (
    HUMAN,
    FAIL,
    PASS,
    Judgment,
    JudgmentSet,
    Pattern,
    RuleSet,
    SystemOutput,
    TestItem,
)
from .taxonomy import Phenomenon, Taxonomy, load_taxonomy

SUITE_SCHEMA = "suite@1"
LOG_SCHEMA = "log@1"
STATE_SCHEMA = "state@1"

DECIDE_PASS = "decide-pass"
DECIDE_FAIL = "decide-fail"
ADD_POSITIVE = "add-positive-pattern"
ADD_NEGATIVE = "add-negative-pattern"
ADD_EXACT = "add-exact-translation"
EVENT_KINDS = (DECIDE_PASS, DECIDE_FAIL, ADD_POSITIVE, ADD_NEGATIVE, ADD_EXACT)


class FormatError(ValueError):
    """A located parse error in a suite, outputs, or log file."""

    def __init__(self, source: str, line: int, message: str):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")


class ReplayError(ValueError):
    """The log references state that does not exist; replay halts."""

    def __init__(self, seq: int, message: str):
        self.seq = seq
        super().__init__(f"event {seq}: {message}")


@dataclass(frozen=True)
class AnnotationEvent:
    """One appended triage action: a human decision or a rule addition."""

    seq: int
    ts: str
    annotator: str
    kind: str
    item: str
    system: str | None = None
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind in (DECIDE_PASS, DECIDE_FAIL) and not self.system:
            raise ValueError(f"{self.kind} events need a target system")


@dataclass
class Suite:
    """A parsed suite: taxonomy (bundled plus declared) and its items."""

    taxonomy: Taxonomy
    items: list[TestItem] = field(default_factory=list)
    declared: list[Phenomenon] = field(default_factory=list)

    def item(self, item_id: str) -> TestItem:
        for candidate in self.items:
            if candidate.id == item_id:
                return candidate
        raise KeyError(item_id)

    def items_by_id(self) -> dict[str, TestItem]:
        return {item.id: item for item in self.items}

    def copy(self) -> "Suite":
        items = [
            replace(item, rules=item.rules.copy())
            for item in self.items
        ]
        return Suite(self.taxonomy.copy(), items, list(self.declared))


def _pattern_from_record(record, source: str, line: int) -> Pattern:
    if isinstance(record, str):
        record = {"expression": record}
    if not isinstance(record, dict) or "expression" not in record:
        raise FormatError(source, line, f"bad pattern record {record!r}")
    try:
        pattern = Pattern(
            expression=record["expression"],
            case_insensitive=bool(record.get("case_insensitive", False)),
            author=record.get("author"),
            created_at=record.get("created_at"),
        )
    except ValueError as exc:
        raise FormatError(source, line, str(exc)) from None
    try:
        matcher.compile_pattern(pattern.expression, pattern.case_insensitive)
    except matcher.PatternError as exc:
        raise FormatError(source, line, str(exc)) from None
    return pattern


def _pattern_to_record(pattern: Pattern) -> dict:
    return {
        "expression": pattern.expression,
        "case_insensitive": pattern.case_insensitive,
        "author": pattern.author,
        "created_at": pattern.created_at,
    }


def parse_suite(
    text: str,
    base_taxonomy: Taxonomy | None = None,
    source: str = "<string>",
) -> Suite:
    """Parse a suite file; every record either yields an item or a located error."""
    taxonomy = (base_taxonomy or load_taxonomy()).copy()
    suite = Suite(taxonomy)
    seen_header = False
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise FormatError(source, lineno, f"invalid record: {exc.msg}") from None
        if not seen_header:
            if record.get("schema") != SUITE_SCHEMA:
                raise FormatError(
                    source, lineno,
                    f"unsupported schema {record.get('schema')!r}, expected {SUITE_SCHEMA!r}",
                )
            seen_header = True
            continue
        if "phenomenon" in record and "id" not in record:
            decl = record["phenomenon"]
            try:
                phenomenon = Phenomenon(
                    id=decl["id"],
                    name=decl.get("name", decl["id"]),
                    category=decl["category"],
                    tense_group=decl.get("tense_group"),
                    verb_type_group=decl.get("verb_type_group"),
                )
            except KeyError as exc:
                raise FormatError(source, lineno, f"phenomenon record missing {exc}") from None
            try:
                taxonomy.register(phenomenon)
            except ValueError as exc:
                raise FormatError(source, lineno, str(exc)) from None
            suite.declared.append(phenomenon)
            continue
        for required in ("id", "source", "phenomenon"):
            if required not in record:
                raise FormatError(source, lineno, f"item record missing {required!r}")
        if record["id"] in seen_ids:
            raise FormatError(source, lineno, f"duplicate item id {record['id']!r}")
        seen_ids.add(record["id"])
        rules = RuleSet(
            positive=[_pattern_from_record(p, source, lineno) for p in record.get("positive", [])],
            negative=[_pattern_from_record(p, source, lineno) for p in record.get("negative", [])],
            exact_valid=list(record.get("exact", [])),
        )
        try:
            item = TestItem(
                id=record["id"],
                source=record["source"],
                phenomenon=record["phenomenon"],
                rules=rules,
                note=record.get("note"),
            )
        except ValueError as exc:
            raise FormatError(source, lineno, str(exc)) from None
        suite.items.append(item)
    if not seen_header:
        raise FormatError(source, 1, "missing schema header")
    return suite


def dump_suite(suite: Suite) -> str:
    """Canonical suite serialization: header, declared phenomena, items by id."""
    lines = [json.dumps({"schema": SUITE_SCHEMA})]
    for phenomenon in sorted(suite.declared, key=lambda p: p.id):
        decl: dict = {"id": phenomenon.id, "name": phenomenon.name, "category": phenomenon.category}
        if phenomenon.tense_group is not None:
            decl["tense_group"] = phenomenon.tense_group
        if phenomenon.verb_type_group is not None:
            decl["verb_type_group"] = phenomenon.verb_type_group
        lines.append(json.dumps({"phenomenon": decl}, ensure_ascii=False))
    for item in sorted(suite.items, key=lambda i: i.id):
        record = {
            "id": item.id,
            "source": item.source,
            "phenomenon": item.phenomenon,
            "positive": [_pattern_to_record(p) for p in item.rules.positive],
            "negative": [_pattern_to_record(p) for p in item.rules.negative],
            "exact": list(item.rules.exact_valid),
        }
        if item.note is not None:
            record["note"] = item.note
        lines.append(json.dumps(record, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def import_suite(path: str | Path, base_taxonomy: Taxonomy | None = None) -> Suite:
    path = Path(path)
    return parse_suite(path.read_text("utf-8"), base_taxonomy, source=str(path))


@dataclass
class OutputsImport:
    outputs: list[SystemOutput]
    missing: list[str]  # suite item ids with no output line


def parse_outputs(
    text: str,
    system: str,
    suite: Suite,
    source: str = "<string>",
) -> OutputsImport:
    """Parse ``item-id<TAB>text`` lines for one system."""
    by_id = suite.items_by_id()
    outputs: list[SystemOutput] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw:
            continue
        item_id, sep, value = raw.partition("\t")
        if not sep:
            raise FormatError(source, lineno, "expected item-id<TAB>text")
        if item_id not in by_id:
            raise FormatError(source, lineno, f"unknown item id {item_id!r}")
        if item_id in seen:
            raise FormatError(source, lineno, f"duplicate output for item {item_id!r}")
        seen.add(item_id)
        outputs.append(SystemOutput(system=system, item=item_id, text=value))
    missing = sorted(set(by_id) - seen)
    return OutputsImport(outputs=outputs, missing=missing)


def dump_outputs(outputs: Iterable[SystemOutput]) -> str:
    lines = [f"{o.item}\t{o.text}" for o in sorted(outputs, key=lambda o: o.item)]
    return "\n".join(lines) + "\n" if lines else ""


def import_outputs(path: str | Path, system: str, suite: Suite) -> OutputsImport:
    path = Path(path)
    return parse_outputs(path.read_text("utf-8"), system, suite, source=str(path))


def _event_to_record(event: AnnotationEvent) -> dict:
    return {
        "seq": event.seq,
        "ts": event.ts,
        "annotator": event.annotator,
        "kind": event.kind,
        "item": event.item,
        "system": event.system,
        "payload": event.payload,
    }


def parse_log(text: str, source: str = "<string>") -> list[AnnotationEvent]:
    events: list[AnnotationEvent] = []
    seen_header = False
    last_seq = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise FormatError(source, lineno, f"invalid record: {exc.msg}") from None
        if not seen_header:
            if record.get("schema") != LOG_SCHEMA:
                raise FormatError(
                    source, lineno,
                    f"unsupported schema {record.get('schema')!r}, expected {LOG_SCHEMA!r}",
                )
            seen_header = True
            continue
        try:
            event = AnnotationEvent(
                seq=record["seq"],
                ts=record["ts"],
                annotator=record["annotator"],
                kind=record["kind"],
                item=record["item"],
                system=record.get("system"),
                payload=record.get("payload", {}),
            )
        except (KeyError, ValueError) as exc:
            raise FormatError(source, lineno, f"bad event: {exc}") from None
        if event.seq <= last_seq:
            raise FormatError(
                source, lineno, f"sequence must increase: {event.seq} after {last_seq}"
            )
        last_seq = event.seq
        events.append(event)
    if not seen_header:
        raise FormatError(source, 1, "missing schema header")
    return events


def dump_log(events: Iterable[AnnotationEvent]) -> str:
    lines = [json.dumps({"schema": LOG_SCHEMA})]
    lines.extend(json.dumps(_event_to_record(e), ensure_ascii=False) for e in events)
    return "\n".join(lines) + "\n"


def import_log(path: str | Path) -> list[AnnotationEvent]:
    path = Path(path)
    if not path.exists():
        return []
    return parse_log(path.read_text("utf-8"), source=str(path))


def append_event(path: str | Path, event: AnnotationEvent) -> None:
    """Append one event; creates the log with its header on first use."""
    path = Path(path)
    if not path.exists():
        path.write_text(json.dumps({"schema": LOG_SCHEMA}) + "\n", "utf-8")
    with path.open("a", encoding="utf-8") as handle:
        handle.write(json.dumps(_event_to_record(event), ensure_ascii=False) + "\n")


def apply_event(
    event: AnnotationEvent,
    suite: Suite,
    outputs_by_system: Mapping[str, Mapping[str, SystemOutput]],
    judgment_sets: dict[str, JudgmentSet],
) -> None:
    """Fold one event into effective state (mutates suite and judgments).

    Human decisions override verdicts and survive later automatic
    re-classification; only a later decide event supersedes them.
    """
    items_by_id = suite.items_by_id()
    if event.item not in items_by_id:
        raise ReplayError(event.seq, f"unknown item {event.item!r}")
    item = items_by_id[event.item]

    if event.kind in (DECIDE_PASS, DECIDE_FAIL):
        if event.system not in judgment_sets:
            raise ReplayError(event.seq, f"unknown system {event.system!r}")
        judgment_set = judgment_sets[event.system]
        if event.item not in judgment_set.judgments:
            raise ReplayError(event.seq, f"no judgment for ({event.system!r}, {event.item!r})")
        verdict = PASS if event.kind == DECIDE_PASS else FAIL
        judgment_set.judgments[event.item] = Judgment(
            system=event.system,
            item=event.item,
            verdict=verdict,
            cause="human-decision",
            decided_by=HUMAN,
        )
        return

    if event.kind in (ADD_POSITIVE, ADD_NEGATIVE):
        payload = event.payload
        if "expression" not in payload:
            raise ReplayError(event.seq, "pattern event payload missing 'expression'")
        try:
            pattern = Pattern(
                expression=payload["expression"],
                case_insensitive=bool(payload.get("case_insensitive", False)),
                author=event.annotator,
                created_at=event.ts,
            )
            matcher.compile_pattern(pattern.expression, pattern.case_insensitive)
        except (ValueError, matcher.PatternError) as exc:
            raise ReplayError(event.seq, str(exc)) from None
        if event.kind == ADD_POSITIVE:
            item.rules.positive.append(pattern)
        else:
            item.rules.negative.append(pattern)
    elif event.kind == ADD_EXACT:
        if "text" not in event.payload:
            raise ReplayError(event.seq, "exact event payload missing 'text'")
        item.rules.add_exact(event.payload["text"])

    # Re-classify this item for every system, leaving human verdicts alone.
    for system, judgment_set in judgment_sets.items():
        current = judgment_set.judgments.get(event.item)
        if current is None or current.decided_by == HUMAN:
            continue
        output = outputs_by_system.get(system, {}).get(event.item)
        if output is None:
            continue
        judgment_set.judgments[event.item] = matcher.classify(output, item)


def replay(
    suite: Suite,
    outputs_by_system: Mapping[str, Iterable[SystemOutput]],
    events: Iterable[AnnotationEvent],
) -> tuple[Suite, dict[str, JudgmentSet]]:
    """Deterministic fold of the annotation log over the imported base.

    Returns the effective suite (rule sets grown by the log) and effective
    judgments. The same inputs always produce the same state.
    """
    effective = suite.copy()
    outputs_index: dict[str, dict[str, SystemOutput]] = {}
    judgment_sets: dict[str, JudgmentSet] = {}
    for system in sorted(outputs_by_system):
        outputs = list(outputs_by_system[system])
        outputs_index[system] = {o.item: o for o in outputs}
        judgment_sets[system] = matcher.evaluate_run(outputs, effective.items, system=system)
    for event in events:
        apply_event(event, effective, outputs_index, judgment_sets)
    return effective, judgment_sets


def _judgment_to_record(judgment: Judgment) -> dict:
    matched = None
    if judgment.matched_rule is not None:
        matched = {
            "expression": judgment.matched_rule.expression,
            "case_insensitive": judgment.matched_rule.case_insensitive,
        }
    return {
        "system": judgment.system,
        "item": judgment.item,
        "verdict": judgment.verdict,
        "cause": judgment.cause,
        "matched_rule": matched,
        "decided_by": judgment.decided_by,
    }


def export_state(suite: Suite, judgment_sets: Mapping[str, JudgmentSet]) -> str:
    """Canonical serialization of effective state, for diffing and tests."""
    lines = [json.dumps({"schema": STATE_SCHEMA})]
    lines.append(dump_suite(suite).rstrip("\n"))
    for system in sorted(judgment_sets):
        judgments = judgment_sets[system].judgments
        for item_id in sorted(judgments):
            lines.append(json.dumps(_judgment_to_record(judgments[item_id]), ensure_ascii=False))
    return "\n".join(lines) + "\n"


class SuiteDir:
    """A suite working directory with fixed file names.

    Layout: ``suite.jsonl``, ``outputs/<system>.tsv``, ``log.jsonl``; report
    artifacts default to ``reports/``.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    @property
    def suite_path(self) -> Path:
        return self.root / "suite.jsonl"

    @property
    def outputs_dir(self) -> Path:
        return self.root / "outputs"

    @property
    def log_path(self) -> Path:
        return self.root / "log.jsonl"

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"

    def output_path(self, system: str) -> Path:
        return self.outputs_dir / f"{system}.tsv"

    def systems(self) -> list[str]:
        if not self.outputs_dir.is_dir():
            return []
        return sorted(p.stem for p in self.outputs_dir.glob("*.tsv"))

    def load_suite(self) -> Suite:
        return import_suite(self.suite_path)

    def load_outputs(self, suite: Suite) -> dict[str, list[SystemOutput]]:
        return {
            system: import_outputs(self.output_path(system), system, suite).outputs
            for system in self.systems()
        }

    def load_events(self) -> list[AnnotationEvent]:
        return import_log(self.log_path)

    def load(self) -> tuple[Suite, dict[str, list[SystemOutput]], list[AnnotationEvent]]:
        suite = self.load_suite()
        return suite, self.load_outputs(suite), self.load_events()

    def effective(self) -> tuple[Suite, dict[str, JudgmentSet]]:
        suite, outputs, events = self.load()
        return replay(suite, outputs, events)

    def base_judgments(self) -> dict[str, JudgmentSet]:
        suite = self.load_suite()
        outputs = self.load_outputs(suite)
        return {
            system: matcher.evaluate_run(outs, suite.items, system=system)
            for system, outs in outputs.items()
        }

    def next_seq(self) -> int:
        events = self.load_events()
        return events[-1].seq + 1 if events else 1

    def append(self, event: AnnotationEvent) -> None:
        append_event(self.log_path, event)
