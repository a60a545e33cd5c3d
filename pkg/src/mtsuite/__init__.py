"""Rule-based test-suite evaluation harness for machine translation outputs."""

from .model import (
    FAIL,
    PASS,
    WARNING,
    Judgment,
    JudgmentSet,
    Pattern,
    RuleSet,
    SystemOutput,
    TestItem,
    validate_suite,
)
from .matcher import NormalizationPolicy, classify, evaluate_run, normalize
from .taxonomy import Category, Phenomenon, Taxonomy, load_taxonomy

__all__ = [
    "PASS",
    "FAIL",
    "WARNING",
    "Category",
    "Judgment",
    "JudgmentSet",
    "NormalizationPolicy",
    "Pattern",
    "Phenomenon",
    "RuleSet",
    "SystemOutput",
    "Taxonomy",
    "TestItem",
    "classify",
    "evaluate_run",
    "load_taxonomy",
    "normalize",
    "validate_suite",
]

__version__ = "0.1.0"
