"""Classify MT outputs against rule sets into pass/fail/warning.

Classification order: empty output, then exact-translation containment,
then the positive/negative pattern lists. A lone positive match passes, a
lone negative match fails, both matching is a conflict warning, neither is
a no-match warning. Conflicts and no-matches go to human triage.
"""

from __future__ import annotations

import functools
import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable

from .model import (
    AUTOMATIC,
    FAIL,
    PASS,
    WARNING,
    Judgment,
    JudgmentSet,
    SystemOutput,
    TestItem,
)

_WHITESPACE_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class NormalizationPolicy:
    """Text normalization applied before any matching.

    Case and punctuation are deliberately left untouched: both are scored
    properties of the translation, not noise.
    """

    unicode_form: str = "NFC"
    strip: bool = True
    collapse_whitespace: bool = True
    fold_case: bool = False
    map_punctuation: bool = False


DEFAULT_POLICY = NormalizationPolicy()


def normalize(text: str, policy: NormalizationPolicy = DEFAULT_POLICY) -> str:
    """Normalize raw output text. Idempotent under any policy."""
    out = unicodedata.normalize(policy.unicode_form, text)
    if policy.collapse_whitespace:
        out = _WHITESPACE_RUN.sub(" ", out)
    if policy.strip:
        out = out.strip()
    if policy.fold_case:
        out = out.casefold()
    return out


class PatternError(ValueError):
    """A rule expression that is empty, non-portable, or does not compile."""

    def __init__(self, expression: str, reason: str):
        self.expression = expression
        self.reason = reason
        super().__init__(f"bad pattern {expression!r}: {reason}")


class ClassificationError(RuntimeError):
    """A rule failed to compile while classifying a specific item."""

    def __init__(self, item_id: str, expression: str, reason: str):
        self.item_id = item_id
        self.expression = expression
        super().__init__(f"item {item_id!r}: bad pattern {expression!r}: {reason}")


class UnknownItemError(ValueError):
    """Outputs referenced item ids that are not in the suite."""

    def __init__(self, orphans: list[str]):
        self.orphans = sorted(orphans)
        super().__init__("outputs reference unknown items: " + ", ".join(self.orphans))


def _find_backreference(expression: str) -> str | None:
    """Return the offending token if the expression uses a backreference.

    Backreferences are excluded from the supported dialect; negative
    lookahead, anchors, classes, bounded repetition etc. remain allowed.
    """
    i = 0
    in_class = False
    n = len(expression)
    while i < n:
        ch = expression[i]
        if ch == "\\" and i + 1 < n:
            nxt = expression[i + 1]
            if not in_class and nxt.isdigit() and nxt != "0":
                return f"\\{nxt}"
            i += 2
            continue
        if in_class:
            if ch == "]":
                in_class = False
        elif ch == "[":
            in_class = True
        elif ch == "(" and expression.startswith("(?P=", i):
            end = expression.find(")", i)
            return expression[i : end + 1 if end != -1 else n]
        i += 1
    return None


@functools.lru_cache(maxsize=4096)
def _compile(expression: str, case_insensitive: bool) -> re.Pattern:
    if not expression:
        raise PatternError(expression, "empty expression")
    backref = _find_backreference(expression)
    if backref is not None:
        raise PatternError(expression, f"backreference {backref!r} is not supported")
    flags = re.IGNORECASE if case_insensitive else 0
    try:
        return re.compile(expression, flags)
    except re.error as exc:
        raise PatternError(expression, str(exc)) from None


def compile_pattern(expression: str, case_insensitive: bool = False) -> re.Pattern:
    """Compile a rule expression in the supported dialect or raise PatternError."""
    return _compile(expression, case_insensitive)


def classify(
    output: SystemOutput,
    item: TestItem,
    policy: NormalizationPolicy = DEFAULT_POLICY,
) -> Judgment:
    """Judge one system output against its item's rules."""
    text = normalize(output.text, policy)
    if not text:
        return Judgment(output.system, item.id, WARNING, "empty-output")
    if any(text == exact for exact in item.rules.exact_valid):
        return Judgment(output.system, item.id, PASS, "exact-match")

    def first_match(patterns):
        for pattern in patterns:
            try:
                compiled = compile_pattern(pattern.expression, pattern.case_insensitive)
            except PatternError as exc:
                raise ClassificationError(item.id, pattern.expression, exc.reason) from None
            if compiled.search(text):
                return pattern
        return None

    positive = first_match(item.rules.positive)
    negative = first_match(item.rules.negative)
    if positive is not None and negative is None:
        return Judgment(output.system, item.id, PASS, "positive-match", matched_rule=positive)
    if negative is not None and positive is None:
        return Judgment(output.system, item.id, FAIL, "negative-match", matched_rule=negative)
    if positive is not None and negative is not None:
        return Judgment(output.system, item.id, WARNING, "conflict")
    return Judgment(output.system, item.id, WARNING, "no-match")


def evaluate_run(
    outputs: Iterable[SystemOutput],
    items: Iterable[TestItem],
    system: str | None = None,
    policy: NormalizationPolicy = DEFAULT_POLICY,
) -> JudgmentSet:
    """Judge one system's outputs over the whole suite.

    Every suite item gets exactly one judgment: classified when an output
    is present, warning/empty-output when it is missing. Deterministic for
    identical inputs.
    """
    items = list(items)
    by_id = {item.id: item for item in items}
    outputs = list(outputs)
    orphans = [o.item for o in outputs if o.item not in by_id]
    if orphans:
        raise UnknownItemError(orphans)
    if system is None:
        systems = {o.system for o in outputs}
        if len(systems) > 1:
            raise ValueError(f"outputs span multiple systems: {sorted(systems)}")
        system = systems.pop() if systems else ""

    judgments: dict[str, Judgment] = {}
    for output in outputs:
        if output.item in judgments:
            raise ValueError(f"duplicate output for ({system!r}, {output.item!r})")
        judgments[output.item] = classify(output, by_id[output.item], policy)
    for item in items:
        if item.id not in judgments:
            judgments[item.id] = Judgment(
                system, item.id, WARNING, "empty-output", decided_by=AUTOMATIC
            )
    return JudgmentSet(system=system, judgments=judgments)
