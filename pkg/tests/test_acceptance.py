"""Acceptance suite: one test per release criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
PASS/FAIL lines.
"""

import math
import random
import time
from fractions import Fraction

from mtsuite.analysis import (
    AccuracyCell,
    EmptyAnalysisError,
    filter_analysis1,
    filter_analysis2,
    non_weighted_exact,
    render_percent,
    render_percent_fraction,
    top_cluster,
    warning_stats,
    weighted_exact,
    z_test,
)
from mtsuite.matcher import classify, evaluate_run
from mtsuite.model import FAIL, PASS, WARNING, JudgmentSet, SystemOutput
from mtsuite.store import (
    ADD_EXACT,
    ADD_NEGATIVE,
    ADD_POSITIVE,
    DECIDE_FAIL,
    DECIDE_PASS,
    AnnotationEvent,
    Suite,
    export_state,
    replay,
)
from mtsuite.taxonomy import Phenomenon, load_taxonomy

from conftest import make_item, synthetic_judgments


def _criterion(name: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail and not ok:
        line += f" -- {detail}"
    print(line)
    assert ok, line


# --- 1. worked-example fixtures -------------------------------------------

EXPECTED_VERDICTS = {
    ("NTT", "punct-001"): PASS,
    ("Online-F", "punct-001"): FAIL,
    ("Ubiqus", "punct-001"): FAIL,
    ("Online-B", "neg-001"): PASS,
    ("Online-G", "neg-001"): FAIL,
    ("RWTH", "mwe-001"): PASS,
    ("MLLP", "mwe-001"): FAIL,
    ("UCAM", "mwe-001"): FAIL,
}


def test_worked_example_fixtures(worked_examples_suite, worked_examples_outputs):
    items = worked_examples_suite.items_by_id()
    started = time.perf_counter()
    got = {
        key: classify(output, items[key[1]]).verdict
        for key, output in worked_examples_outputs.items()
    }
    elapsed = time.perf_counter() - started
    mismatches = {k: v for k, v in got.items() if v != EXPECTED_VERDICTS[k]}
    _criterion(
        "worked-example fixtures classify as marked, < 1 s",
        not mismatches and elapsed < 1.0,
        f"mismatches={mismatches} elapsed={elapsed:.3f}s",
    )


# --- 2. accuracy formula ----------------------------------------------------

def test_accuracy_formula_rendering():
    rendered = (render_percent(20, 20), render_percent(13, 20), render_percent(12, 20))
    _criterion(
        "accuracy rendering: 20/20->100.0, 13/20->65.0, 12/20->60.0",
        rendered == ("100.0", "65.0", "60.0"),
        f"got {rendered}",
    )


# --- 3. significance clustering ---------------------------------------------

NEGATION_ROW = {
    "JHU": 20, "LMU": 18, "MLLP": 20, "NJUNMT": 19, "NTT": 20, "onl-A": 20,
    "onl-B": 19, "onl-F": 13, "onl-G": 12, "onl-Y": 20, "RWTH": 20,
    "Ubiqus": 19, "UCAM": 20, "uedin": 20,
}


def _oracle_z(c1, n1, c2, n2):
    # independent pooled-proportion computation, spelled out step by step
    pooled = (c1 + c2) / (n1 + n2)
    standard_error = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    return (c1 / n1 - c2 / n2) / standard_error


# hand-computed: 0.1/sqrt(0.95*0.05*0.1) and 0.35/sqrt(0.825*0.175*0.1)
HAND_Z_100_VS_90 = 1.4509525
HAND_Z_100_VS_65 = 2.9128763


def test_significance_clustering_on_negation_row():
    cells = [AccuracyCell(s, "negation", c, 20) for s, c in NEGATION_ROW.items()]
    cluster = top_cluster(cells)
    expected = {s for s, c in NEGATION_ROW.items() if c / 20 >= 0.90}

    z_90 = z_test(20, 20, 18, 20)
    z_65 = z_test(20, 20, 13, 20)
    oracle_ok = (
        abs(z_90.z - HAND_Z_100_VS_90) < 1e-3
        and abs(z_65.z - HAND_Z_100_VS_65) < 1e-3
        and abs(z_90.z - _oracle_z(20, 20, 18, 20)) < 1e-3
        and abs(z_65.z - _oracle_z(20, 20, 13, 20)) < 1e-3
        and not z_90.significant
        and z_65.significant
    )
    _criterion(
        "top cluster on n=20 row = systems >= 90%, z within 1e-3 of oracle",
        cluster == expected and oracle_ok,
        f"cluster={sorted(cluster)} z90={z_90} z65={z_65}",
    )


# --- 4. averages -------------------------------------------------------------

def test_average_definitions():
    cells = [AccuracyCell("A", "c1", 90, 100), AccuracyCell("A", "c2", 1, 2)]
    non_weighted = render_percent_fraction(non_weighted_exact(cells))
    weighted = render_percent_fraction(weighted_exact(cells))

    rng = random.Random(48151623)
    coincide = True
    for _ in range(1000):
        n = rng.randint(1, 40)
        k = rng.randint(1, 9)
        fixture = [
            AccuracyCell("A", f"c{j}", rng.randint(0, n), n) for j in range(k)
        ]
        if non_weighted_exact(fixture) != weighted_exact(fixture):
            coincide = False
            break
    _criterion(
        "averages: 90/100+1/2 -> non-weighted 89.2, weighted 70.0; "
        "equal-sized categories coincide (1,000 fixtures)",
        (non_weighted, weighted) == ("89.2", "70.0") and coincide,
        f"non_weighted={non_weighted} weighted={weighted} coincide={coincide}",
    )


# --- 5. analysis set semantics ------------------------------------------------

def test_analysis_filter_semantics():
    rng = random.Random(92631)
    trials = 10_000
    failures = []
    for trial in range(trials):
        n_systems = rng.randint(2, 5)
        n_items = rng.randint(3, 15)
        warn_p = rng.choice([0.1, 0.3, 0.5])
        items = [f"i{j}" for j in range(n_items)]
        sets = {}
        for s in range(n_systems):
            verdicts = {}
            for item in items:
                roll = rng.random()
                verdicts[item] = WARNING if roll < warn_p else (PASS if roll < 0.8 else FAIL)
            sets[f"s{s}"] = synthetic_judgments(f"s{s}", verdicts)
        excluded = ["s0"] if n_systems > 2 and rng.random() < 0.3 else []
        included = [s for s in sets if s not in excluded]
        analysis2_sets = {s: set(filter_analysis2(sets[s])) for s in included}
        intersection = set.intersection(*analysis2_sets.values())
        try:
            analysis1 = set(filter_analysis1(sets, excluded))
        except EmptyAnalysisError:
            analysis1 = set()
        if analysis1 != intersection:
            failures.append((trial, "set mismatch"))
            break
        if any(len(analysis2_sets[s]) < len(analysis1) for s in included):
            failures.append((trial, "analysis2 smaller than analysis1"))
            break
    _criterion(
        f"analysis1 = intersection of per-system analysis2 sets ({trials:,} trials)",
        not failures,
        str(failures[:1]),
    )


# --- 6. replay determinism ------------------------------------------------------

WORDS = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot"]


def _random_state(rng: random.Random):
    taxonomy = load_taxonomy()
    suite = Suite(taxonomy.copy())
    items = []
    for j in range(rng.randint(5, 12)):
        positive = [rf"\b{rng.choice(WORDS)}\b" for _ in range(rng.randint(0, 2))]
        negative = [rf"\b{rng.choice(WORDS)}\b" for _ in range(rng.randint(0, 1))]
        items.append(make_item(f"item-{j}", f"Quelle {j}", "idiom",
                               positive=positive, negative=negative))
    suite.items = items
    systems = [f"sys{c}" for c in range(rng.randint(2, 3))]
    outputs = {}
    for system in systems:
        outs = []
        for item in items:
            if rng.random() < 0.85:
                text = " ".join(rng.choice(WORDS) for _ in range(rng.randint(0, 5)))
                outs.append(SystemOutput(system, item.id, text))
        outputs[system] = outs
    return suite, outputs, systems


def _random_log(rng: random.Random, suite, systems, max_events=500):
    events = []
    for seq in range(1, rng.randint(2, max_events + 1)):
        kind = rng.choice([DECIDE_PASS, DECIDE_FAIL, ADD_POSITIVE, ADD_NEGATIVE, ADD_EXACT])
        item = rng.choice(suite.items).id
        system = rng.choice(systems) if kind in (DECIDE_PASS, DECIDE_FAIL) else None
        if kind in (ADD_POSITIVE, ADD_NEGATIVE):
            payload = {"expression": rf"\b{rng.choice(WORDS)}\b", "case_insensitive": False}
        elif kind == ADD_EXACT:
            payload = {"text": " ".join(rng.choice(WORDS) for _ in range(3))}
        else:
            payload = {}
        events.append(AnnotationEvent(seq, "2026-08-08T00:00:00+00:00", "annot",
                                      kind, item, system, payload))
    return events


def test_replay_determinism_and_human_precedence():
    rng = random.Random(777)
    ok = True
    detail = ""
    for round_no in range(25):
        suite, outputs, systems = _random_state(rng)
        events = _random_log(rng, suite, systems)
        first = export_state(*replay(suite, outputs, events))
        second = export_state(*replay(suite, outputs, events))
        if first != second:
            ok, detail = False, f"round {round_no}: states differ"
            break
        # last decide event per pair must be the final word
        last_decide = {}
        for event in events:
            if event.kind in (DECIDE_PASS, DECIDE_FAIL):
                last_decide[(event.system, event.item)] = event.kind
        _, judgments = replay(suite, outputs, events)
        for (system, item), kind in last_decide.items():
            judgment = judgments[system].judgments[item]
            wanted = PASS if kind == DECIDE_PASS else FAIL
            if judgment.verdict != wanted or judgment.decided_by != "human":
                ok, detail = False, f"round {round_no}: human decision overwritten on {(system, item)}"
                break
        if not ok:
            break
    _criterion(
        "replay determinism: byte-identical state, human decisions preserved "
        "(25 random logs of <= 500 events)",
        ok,
        detail,
    )


# --- 7. warning-rate accounting -----------------------------------------------

def _warning_rate_fixture():
    taxonomy = load_taxonomy()
    suite = Suite(taxonomy.copy())
    phenomenon = Phenomenon(id="probe", name="probe", category="negation")
    suite.taxonomy.register(phenomenon)
    suite.declared.append(phenomenon)
    items, outputs = [], []
    for j in range(479):  # clean passes
        items.append(make_item(f"p{j:03d}", "Quelle", "probe", positive=[r"\bgood\b"]))
        outputs.append(SystemOutput("sysA", f"p{j:03d}", f"good translation {j}"))
    for j in range(200):  # clean fails
        items.append(make_item(f"f{j:03d}", "Quelle", "probe",
                               positive=[r"\bgood\b"], negative=[r"\bbad\b"]))
        outputs.append(SystemOutput("sysA", f"f{j:03d}", f"bad translation {j}"))
    for j in range(321):  # uncovered -> warnings
        items.append(make_item(f"w{j:03d}", "Quelle", "probe", positive=[r"\bgood\b"]))
        text = f"uncovered variant {j}" if j < 100 else f"unresolved mystery {j}"
        outputs.append(SystemOutput("sysA", f"w{j:03d}", text))
    suite.items = items
    return suite, {"sysA": outputs}


def test_warning_rate_accounting():
    suite, outputs = _warning_rate_fixture()
    base = {"sysA": evaluate_run(outputs["sysA"], suite.items, system="sysA")}
    before_rate = base["sysA"].warning_rate()

    # scripted triage: one covering rule per easy item, decisions for the rest
    events = []
    seq = 1
    for j in range(100):
        events.append(AnnotationEvent(seq, "2026-08-08T01:00:00+00:00", "vee", ADD_POSITIVE,
                                      f"w{j:03d}", None,
                                      {"expression": r"\bvariant\b", "case_insensitive": False}))
        seq += 1
    for j in range(100, 271):
        events.append(AnnotationEvent(seq, "2026-08-08T02:00:00+00:00", "vee", DECIDE_PASS,
                                      f"w{j:03d}", "sysA", {}))
        seq += 1
    _, judgments = replay(suite, outputs, events)
    stats = warning_stats(base, judgments, {"sysA": 171})
    system = stats.for_system("sysA")
    ok = (
        len(base["sysA"]) == 1000
        and base["sysA"].counts()[WARNING] == 321
        and render_percent(system.warnings_before, system.pairs) == "32.1"
        and system.rate_after < 0.10
        and stats.validated_outputs == 171
    )
    _criterion(
        "warning accounting: 321/1,000 -> 32.1% before, < 10% after scripted triage",
        ok,
        f"before={before_rate:.3f} after={system.rate_after:.3f}",
    )


# --- 8. partition invariant ------------------------------------------------------

def test_partition_invariant():
    rng = random.Random(1331)
    ok = True
    detail = ""
    for trial in range(1000):
        n_items = rng.randint(1, 12)
        items = []
        for j in range(n_items):
            positive = [rf"\b{rng.choice(WORDS)}\b" for _ in range(rng.randint(0, 2))]
            negative = [rf"\b{rng.choice(WORDS)}\b" for _ in range(rng.randint(0, 2))]
            items.append(make_item(f"i{j}", "Quelle", "idiom",
                                   positive=positive, negative=negative))
        outputs = [
            SystemOutput("sys", item.id, " ".join(rng.choice(WORDS)
                                                  for _ in range(rng.randint(0, 4))))
            for item in items
            if rng.random() < 0.9
        ]
        judgment_set = evaluate_run(outputs, items, system="sys")
        counts = judgment_set.counts()
        if counts[PASS] + counts[FAIL] + counts[WARNING] != len(items):
            ok, detail = False, f"trial {trial}: {counts} over {len(items)} items"
            break
    _criterion(
        "partition: pass+fail+warning = evaluated pairs (1,000 random runs)",
        ok,
        detail,
    )
