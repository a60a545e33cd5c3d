from __future__ import annotations

import pytest

from mtsuite.model import (
    FAIL,
    PASS,
    WARNING,
    Judgment,
    JudgmentSet,
    Pattern,
    RuleSet,
    SystemOutput,
    TestItem,
)
from mtsuite.store import Suite
from mtsuite.taxonomy import Phenomenon, load_taxonomy


def make_item(item_id, source, phenomenon, positive=(), negative=(), exact=(), note=None):
    return TestItem(
        id=item_id,
        source=source,
        phenomenon=phenomenon,
        rules=RuleSet(
            positive=[Pattern(p) if isinstance(p, str) else p for p in positive],
            negative=[Pattern(p) if isinstance(p, str) else p for p in negative],
            exact_valid=list(exact),
        ),
        note=note,
    )


_CAUSE_FOR = {PASS: "positive-match", FAIL: "negative-match", WARNING: "no-match"}


def synthetic_judgments(system: str, verdicts: dict[str, str]) -> JudgmentSet:
    """Build a JudgmentSet directly from item->verdict, for analysis tests."""
    return JudgmentSet(
        system=system,
        judgments={
            item: Judgment(system, item, verdict, _CAUSE_FOR[verdict])
            for item, verdict in verdicts.items()
        },
    )


@pytest.fixture(scope="session")
def taxonomy():
    return load_taxonomy()


@pytest.fixture()
def worked_examples_suite(taxonomy):
    """Mini-suite for the three quoted grading scenarios: direct-speech
    punctuation, dropped negation, and a literal idiom translation."""
    suite = Suite(taxonomy.copy())
    negation_phenomenon = Phenomenon(
        id="negation-particle", name="negation particle", category="negation"
    )
    suite.taxonomy.register(negation_phenomenon)
    suite.declared.append(negation_phenomenon)
    suite.items = [
        make_item(
            "punct-001",
            "Er rief: „Ich gewinne!“",
            "quotation-marks",
            positive=[', ["“]'],
            negative=[': ["“]'],
        ),
        make_item(
            "neg-001",
            "Tim wäscht seine Kleidung nie selber.",
            "negation-particle",
            positive=[r"\bnever\b"],
            negative=[r"^(?!.*\bnever\b)"],
        ),
        make_item(
            "mwe-001",
            "Du bist auf dem Holzweg.",
            "idiom",
            positive=["wrong track"],
            negative=["wood(en)? (track|path|way)"],
        ),
    ]
    return suite


WORKED_OUTPUTS = {
    ("NTT", "punct-001"): 'He shouted, "I win!"',
    ("Online-F", "punct-001"): 'He called: "I win!"',
    ("Ubiqus", "punct-001"): 'He cried: "I win!"',
    ("Online-B", "neg-001"): "Tim never washes his clothes himself.",
    ("Online-G", "neg-001"): "Tim is washing his clothes myself.",
    ("RWTH", "mwe-001"): "You're on the wrong track.",
    ("MLLP", "mwe-001"): "You're on the wood track.",
    ("UCAM", "mwe-001"): "You're on the wooden path.",
}


@pytest.fixture()
def worked_examples_outputs():
    return {
        (system, item): SystemOutput(system=system, item=item, text=text)
        for (system, item), text in WORKED_OUTPUTS.items()
    }
