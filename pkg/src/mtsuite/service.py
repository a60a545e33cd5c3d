"""HTTP triage service: warning queue, decisions, rule editing, reports.

A single service instance owns one suite working directory. Reads are
side-effect free; every mutation appends exactly one annotation event and
folds it into in-memory state, so state always equals a from-scratch
replay of the log. Mutations are serialized through one writer lock and
return a monotonically increasing state version for staleness detection.
"""

from __future__ import annotations

import threading
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import matcher, store
from .analysis import SignificanceConfig, warning_stats
from .model import HUMAN, WARNING, Judgment, JudgmentSet, Pattern, SystemOutput
from .report import GROUPINGS, compute_analysis, group_table, render
from .store import (
    ADD_EXACT,
    ADD_NEGATIVE,
    ADD_POSITIVE,
    DECIDE_FAIL,
    DECIDE_PASS,
    AnnotationEvent,
    Suite,
    SuiteDir,
)

DEFAULT_PAGE_SIZE = 50


class DecisionRequest(BaseModel):
    item: str
    system: str
    verdict: str
    annotator: str
    override: bool = False


class RuleRequest(BaseModel):
    item: str
    kind: str  # positive | negative | exact
    annotator: str
    expression: str | None = None
    case_insensitive: bool = False
    text: str | None = None


class TriageState:
    """In-memory effective state of one suite directory."""

    def __init__(self, suite_dir: str | Path):
        self.dir = SuiteDir(suite_dir)
        self.lock = threading.Lock()
        self.reload()

    def reload(self) -> None:
        suite, outputs, events = self.dir.load()
        self.base_suite = suite
        self.outputs: dict[str, dict[str, SystemOutput]] = {
            system: {o.item: o for o in outs} for system, outs in outputs.items()
        }
        self.base_judgments = {
            system: matcher.evaluate_run(outs, suite.items, system=system)
            for system, outs in outputs.items()
        }
        self.suite, self.judgments = store.replay(suite, outputs, events)
        self.decisions: dict[str, int] = {}
        for event in events:
            if event.kind in (DECIDE_PASS, DECIDE_FAIL):
                self.decisions[event.system] = self.decisions.get(event.system, 0) + 1
        self.version = events[-1].seq if events else 0

    def append_and_apply(self, kind: str, item: str, system: str | None,
                         annotator: str, payload: dict) -> AnnotationEvent:
        event = AnnotationEvent(
            seq=self.version + 1,
            ts=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            annotator=annotator,
            kind=kind,
            item=item,
            system=system,
            payload=payload,
        )
        store.apply_event(event, self.suite, self.outputs, self.judgments)
        self.dir.append(event)
        if kind in (DECIDE_PASS, DECIDE_FAIL):
            self.decisions[system] = self.decisions.get(system, 0) + 1
        self.version = event.seq
        return event


def _judgment_json(judgment: Judgment) -> dict:
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


def _rules_json(item) -> dict:
    def pattern_json(p: Pattern) -> dict:
        return {"expression": p.expression, "case_insensitive": p.case_insensitive}

    return {
        "positive": [pattern_json(p) for p in item.rules.positive],
        "negative": [pattern_json(p) for p in item.rules.negative],
        "exact": list(item.rules.exact_valid),
    }


def _event_json(event: AnnotationEvent) -> dict:
    return {
        "seq": event.seq,
        "ts": event.ts,
        "annotator": event.annotator,
        "kind": event.kind,
        "item": event.item,
        "system": event.system,
        "payload": event.payload,
    }


def _rule_transitions(
    state: TriageState, suite: Suite, item_id: str, kind: str,
    expression: str | None, case_insensitive: bool, text: str | None,
) -> list[dict]:
    """Per-system verdict changes a rule addition would cause (human kept)."""
    item = suite.items_by_id()[item_id]
    trial_rules = item.rules.copy()
    if kind == "positive":
        trial_rules.positive.append(Pattern(expression, case_insensitive))
    elif kind == "negative":
        trial_rules.negative.append(Pattern(expression, case_insensitive))
    else:
        trial_rules.add_exact(text)
    trial_item = replace(item, rules=trial_rules)
    transitions = []
    for system in sorted(state.judgments):
        current = state.judgments[system].judgments.get(item_id)
        if current is None:
            continue
        output = state.outputs.get(system, {}).get(item_id)
        if current.decided_by == HUMAN or output is None:
            after = current
        else:
            after = matcher.classify(output, trial_item)
        transitions.append(
            {
                "system": system,
                "before": current.verdict,
                "before_cause": current.cause,
                "after": after.verdict,
                "after_cause": after.cause,
                "changed": (current.verdict, current.cause) != (after.verdict, after.cause),
            }
        )
    return transitions


def create_app(suite_dir: str | Path) -> FastAPI:
    state = TriageState(suite_dir)
    app = FastAPI(title="mtsuite triage service")
    app.state.triage = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def invalid_payload(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def warning_entries(system=None, category=None, phenomenon=None, cause=None):
        items_by_id = state.suite.items_by_id()
        taxonomy = state.suite.taxonomy
        entries = []
        for item_list_id in sorted(items_by_id):
            item = items_by_id[item_list_id]
            phen = taxonomy.phenomena.get(item.phenomenon)
            cat_id = phen.category if phen else None
            if phenomenon and item.phenomenon != phenomenon:
                continue
            if category and cat_id != category:
                continue
            for sys_id in sorted(state.judgments):
                if system and sys_id != system:
                    continue
                judgment = state.judgments[sys_id].judgments.get(item.id)
                if judgment is None or judgment.verdict != WARNING:
                    continue
                if cause and judgment.cause != cause:
                    continue
                output = state.outputs.get(sys_id, {}).get(item.id)
                entries.append(
                    {
                        "item": item.id,
                        "system": sys_id,
                        "source": item.source,
                        "output": output.text if output else "",
                        "phenomenon": item.phenomenon,
                        "category": cat_id,
                        "cause": judgment.cause,
                        "rules": _rules_json(item),
                    }
                )
        return entries

    @app.get("/warnings")
    def list_warnings(
        system: str | None = None,
        category: str | None = None,
        phenomenon: str | None = None,
        cause: str | None = None,
        cursor: int = Query(default=0, ge=0),
        limit: int = Query(default=DEFAULT_PAGE_SIZE, ge=1, le=500),
    ):
        entries = warning_entries(system, category, phenomenon, cause)
        page = entries[cursor : cursor + limit]
        next_cursor = cursor + limit if cursor + limit < len(entries) else None
        return {
            "total": len(entries),
            "items": page,
            "cursor": next_cursor,
            "version": state.version,
        }

    @app.post("/decisions", status_code=201)
    def submit_decision(request: DecisionRequest):
        if request.verdict not in ("pass", "fail"):
            raise HTTPException(400, f"verdict must be pass or fail, got {request.verdict!r}")
        with state.lock:
            judgment_set = state.judgments.get(request.system)
            if judgment_set is None or request.item not in judgment_set.judgments:
                raise HTTPException(404, f"no judgment for ({request.system!r}, {request.item!r})")
            current = judgment_set.judgments[request.item]
            if current.verdict != WARNING and not request.override:
                raise HTTPException(
                    409,
                    f"({request.system!r}, {request.item!r}) is {current.verdict!r}, "
                    "not a warning; pass override to re-decide",
                )
            kind = DECIDE_PASS if request.verdict == "pass" else DECIDE_FAIL
            event = state.append_and_apply(kind, request.item, request.system,
                                           request.annotator, {})
            judgment = state.judgments[request.system].judgments[request.item]
        return {
            "event": _event_json(event),
            "judgment": _judgment_json(judgment),
            "version": state.version,
        }

    @app.post("/rules", status_code=201)
    def add_rule(request: RuleRequest, dry_run: bool = False):
        if request.kind not in ("positive", "negative", "exact"):
            raise HTTPException(400, f"kind must be positive, negative, or exact, got {request.kind!r}")
        if request.kind == "exact":
            if not request.text:
                raise HTTPException(400, "exact rules need 'text'")
        else:
            if not request.expression:
                raise HTTPException(400, "pattern rules need 'expression'")
            try:
                matcher.compile_pattern(request.expression, request.case_insensitive)
            except matcher.PatternError as exc:
                raise HTTPException(400, str(exc)) from None
        with state.lock:
            if request.item not in state.suite.items_by_id():
                raise HTTPException(404, f"unknown item {request.item!r}")
            transitions = _rule_transitions(
                state, state.suite, request.item, request.kind,
                request.expression, request.case_insensitive, request.text,
            )
            if dry_run:
                return JSONResponse(
                    status_code=200,
                    content={"event": None, "transitions": transitions, "version": state.version},
                )
            kind = {"positive": ADD_POSITIVE, "negative": ADD_NEGATIVE, "exact": ADD_EXACT}[request.kind]
            if request.kind == "exact":
                payload = {"text": request.text}
            else:
                payload = {
                    "expression": request.expression,
                    "case_insensitive": request.case_insensitive,
                }
            event = state.append_and_apply(kind, request.item, None, request.annotator, payload)
        return {"event": _event_json(event), "transitions": transitions, "version": state.version}

    @app.post("/reevaluate")
    def reevaluate():
        with state.lock:
            state.reload()
        return {"version": state.version}

    @app.get("/reports")
    def get_report(
        mode: str = "analysis1",
        grouping: str = "category",
        format: str = "md",
        min_n: int = 15,
        exclude: str = "",
    ):
        mode = {"1": "analysis1", "2": "analysis2"}.get(mode, mode)
        if mode not in ("analysis1", "analysis2"):
            raise HTTPException(400, f"unknown mode {mode!r}")
        if grouping not in GROUPINGS:
            raise HTTPException(400, f"unknown grouping {grouping!r}")
        excluded = tuple(s for s in exclude.split(",") if s)
        try:
            analysis = compute_analysis(state.suite, state.judgments, mode, excluded)
            table = group_table(analysis, grouping, min_n=min_n, config=SignificanceConfig())
            body = render(table, format)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from None
        return PlainTextResponse(body)

    @app.get("/items/{item_id}")
    def get_item(item_id: str):
        items_by_id = state.suite.items_by_id()
        if item_id not in items_by_id:
            raise HTTPException(404, f"unknown item {item_id!r}")
        item = items_by_id[item_id]
        phen = state.suite.taxonomy.phenomena.get(item.phenomenon)
        outputs = []
        for system in sorted(state.judgments):
            judgment = state.judgments[system].judgments.get(item_id)
            output = state.outputs.get(system, {}).get(item_id)
            outputs.append(
                {
                    "system": system,
                    "text": output.text if output else "",
                    "verdict": judgment.verdict if judgment else None,
                    "cause": judgment.cause if judgment else None,
                    "decided_by": judgment.decided_by if judgment else None,
                }
            )
        return {
            "item": item.id,
            "source": item.source,
            "phenomenon": item.phenomenon,
            "phenomenon_name": phen.name if phen else item.phenomenon,
            "category": phen.category if phen else None,
            "note": item.note,
            "rules": _rules_json(item),
            "outputs": outputs,
            "version": state.version,
        }

    @app.get("/stats")
    def get_stats():
        stats = warning_stats(state.base_judgments, state.judgments, state.decisions)
        return {
            "systems": [
                {
                    "system": s.system,
                    "pairs": s.pairs,
                    "warnings_before": s.warnings_before,
                    "warnings_after": s.warnings_after,
                    "rate_before": s.rate_before,
                    "rate_after": s.rate_after,
                    "decided": s.decided,
                }
                for s in stats.systems
            ],
            "validated_outputs": stats.validated_outputs,
            "version": state.version,
        }

    return app
