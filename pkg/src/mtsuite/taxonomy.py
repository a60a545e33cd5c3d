"""Category taxonomy and the extensible phenomenon registry.

The 14 grading categories are fixed constants shipped as a bundled data
resource; phenomena are an open registry that suite files may extend.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

CATEGORY_COUNT = 14
TAXONOMY_SCHEMA = "taxonomy@1"

# The only category on which tense/verb-type grouping tags are meaningful.
TENSE_CATEGORY_ID = "verb-tense-aspect-mood"


class TaxonomyError(ValueError):
    """Raised when the taxonomy resource or a registration is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Category:
    id: str
    name: str


@dataclass(frozen=True)
class Phenomenon:
    id: str
    name: str
    category: str
    tense_group: str | None = None
    verb_type_group: str | None = None


class Taxonomy:
    """Fixed categories plus a registry of phenomena keyed by id."""

    def __init__(self, categories: list[Category]):
        self.categories: list[Category] = list(categories)
        self._category_ids = {c.id for c in self.categories}
        if len(self._category_ids) != len(self.categories):
            raise TaxonomyError("duplicate category ids")
        self.phenomena: dict[str, Phenomenon] = {}

    def category(self, category_id: str) -> Category:
        for c in self.categories:
            if c.id == category_id:
                return c
        raise KeyError(category_id)

    def category_by_name(self, name: str) -> Category:
        for c in self.categories:
            if c.name == name:
                return c
        raise KeyError(name)

    def phenomenon(self, phenomenon_id: str) -> Phenomenon:
        return self.phenomena[phenomenon_id]

    def phenomena_in(self, category_id: str) -> list[Phenomenon]:
        return [p for p in self.phenomena.values() if p.category == category_id]

    def register(self, phenomenon: Phenomenon, line: int | None = None) -> None:
        """Add a phenomenon to the registry, enforcing the tagging rules."""
        if phenomenon.category not in self._category_ids:
            raise TaxonomyError(
                f"phenomenon {phenomenon.id!r} names unknown category {phenomenon.category!r}",
                line,
            )
        if phenomenon.category != TENSE_CATEGORY_ID and (
            phenomenon.tense_group or phenomenon.verb_type_group
        ):
            raise TaxonomyError(
                f"phenomenon {phenomenon.id!r}: grouping tags are only valid in "
                f"category {TENSE_CATEGORY_ID!r}",
                line,
            )
        existing = self.phenomena.get(phenomenon.id)
        if existing is not None and existing != phenomenon:
            raise TaxonomyError(
                f"phenomenon {phenomenon.id!r} already registered with different fields", line
            )
        self.phenomena[phenomenon.id] = phenomenon

    def copy(self) -> "Taxonomy":
        dup = Taxonomy(self.categories)
        dup.phenomena = dict(self.phenomena)
        return dup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Taxonomy):
            return NotImplemented
        return self.categories == other.categories and self.phenomena == other.phenomena


def _parse_phenomenon(record: dict, category_id: str, line: int) -> Phenomenon:
    try:
        return Phenomenon(
            id=record["id"],
            name=record["name"],
            category=category_id,
            tense_group=record.get("tense_group"),
            verb_type_group=record.get("verb_type_group"),
        )
    except KeyError as exc:
        raise TaxonomyError(f"phenomenon record missing field {exc}", line) from None


def parse_taxonomy(text: str) -> Taxonomy:
    """Parse the line-delimited taxonomy resource.

    First line is a schema header; each following line declares one category
    with its bundled phenomena.
    """
    lines = text.splitlines()
    if not lines:
        raise TaxonomyError("empty taxonomy resource", 1)
    categories: list[Category] = []
    registrations: list[tuple[Phenomenon, int]] = []
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TaxonomyError(f"invalid record: {exc.msg}", lineno) from None
        if lineno == 1:
            if record.get("schema") != TAXONOMY_SCHEMA:
                raise TaxonomyError(
                    f"unsupported schema {record.get('schema')!r}, expected {TAXONOMY_SCHEMA!r}",
                    lineno,
                )
            continue
        if "id" not in record or "name" not in record:
            raise TaxonomyError("category record needs 'id' and 'name'", lineno)
        categories.append(Category(id=record["id"], name=record["name"]))
        for phen in record.get("phenomena", []):
            registrations.append((_parse_phenomenon(phen, record["id"], lineno), lineno))
    taxonomy = Taxonomy(categories)
    for phenomenon, lineno in registrations:
        taxonomy.register(phenomenon, line=lineno)
    return taxonomy


def dump_taxonomy(taxonomy: Taxonomy) -> str:
    """Serialize a taxonomy back to the bundled line format (round-trips)."""
    lines = [json.dumps({"schema": TAXONOMY_SCHEMA})]
    for category in taxonomy.categories:
        phenomena = []
        for p in taxonomy.phenomena.values():
            if p.category != category.id:
                continue
            rec: dict = {"id": p.id, "name": p.name}
            if p.tense_group is not None:
                rec["tense_group"] = p.tense_group
            if p.verb_type_group is not None:
                rec["verb_type_group"] = p.verb_type_group
            phenomena.append(rec)
        lines.append(
            json.dumps(
                {"id": category.id, "name": category.name, "phenomena": phenomena},
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + "\n"


def load_taxonomy() -> Taxonomy:
    """Load the bundled 14-category taxonomy."""
    text = resources.files("mtsuite.data").joinpath("taxonomy.jsonl").read_text("utf-8")
    taxonomy = parse_taxonomy(text)
    if len(taxonomy.categories) != CATEGORY_COUNT:
        raise TaxonomyError(
            f"bundled taxonomy has {len(taxonomy.categories)} categories, expected {CATEGORY_COUNT}"
        )
    return taxonomy
