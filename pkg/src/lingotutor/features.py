"""Grammatical feature bundles and the per-language feature schema."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidFeatures, SchemaViolation


@dataclass(frozen=True, slots=True)
class FeatureBundle:
    """Immutable mapping of feature category to value.

    Stored as a sorted tuple of pairs so bundles hash and compare by
    content. Category and value strings are taken as-is; validation
    against a schema is the caller's job.
    """

    pairs: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, mapping: dict[str, str] | None = None, **values: str) -> "FeatureBundle":
        merged = dict(mapping or {})
        merged.update(values)
        return cls(tuple(sorted((str(k), str(v)) for k, v in merged.items())))

    def get(self, category: str) -> str | None:
        for cat, value in self.pairs:
            if cat == category:
                return value
        return None

    def to_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def categories(self) -> tuple[str, ...]:
        return tuple(cat for cat, _ in self.pairs)

    def contains(self, other: "FeatureBundle") -> bool:
        """True when every pair of `other` is present in this bundle."""
        mine = set(self.pairs)
        return all(pair in mine for pair in other.pairs)

    def with_value(self, category: str, value: str) -> "FeatureBundle":
        kept = {cat: val for cat, val in self.pairs}
        kept[category] = value
        return FeatureBundle.of(kept)

    def without(self, *categories: str) -> "FeatureBundle":
        kept = {cat: val for cat, val in self.pairs if cat not in categories}
        return FeatureBundle.of(kept)

    def __bool__(self) -> bool:
        return bool(self.pairs)

    def __str__(self) -> str:
        inner = ", ".join(f"{c}={v}" for c, v in self.pairs)
        return "{" + inner + "}"


@dataclass(frozen=True)
class FeatureSchema:
    """The closed feature inventory of one language pack.

    categories: category name -> allowed values, in display order.
    pos_tags: allowed part-of-speech tags.
    category_names: localized display name per category ("Case" -> "case").
    value_names: display name per (category, value) ("Par" -> "partitive case").
    citation: per pos, the feature bundle of the citation form shown to
    learners as the baseline for hints.
    """

    categories: dict[str, tuple[str, ...]]
    pos_tags: tuple[str, ...]
    category_names: dict[str, str] = field(default_factory=dict)
    value_names: dict[str, dict[str, str]] = field(default_factory=dict)
    citation: dict[str, FeatureBundle] = field(default_factory=dict)

    def check_value(self, category: str, value: str, where: str = "") -> None:
        prefix = f"{where}: " if where else ""
        if category not in self.categories:
            raise InvalidFeatures(f"{prefix}unknown feature category '{category}'")
        if value not in self.categories[category]:
            raise InvalidFeatures(
                f"{prefix}unknown value '{value}' for category '{category}'"
            )

    def check_bundle(self, bundle: FeatureBundle, where: str = "") -> None:
        for cat, value in bundle.pairs:
            self.check_value(cat, value, where)

    def check_pos(self, pos: str, where: str = "") -> None:
        if pos not in self.pos_tags:
            prefix = f"{where}: " if where else ""
            raise InvalidFeatures(f"{prefix}unknown part of speech '{pos}'")

    def category_name(self, category: str) -> str:
        return self.category_names.get(category, category.lower())

    def value_name(self, category: str, value: str) -> str:
        return self.value_names.get(category, {}).get(value, f"{value} {self.category_name(category)}")

    def citation_for(self, pos: str) -> FeatureBundle:
        return self.citation.get(pos, FeatureBundle())


def schema_from_dict(raw: dict, where: str) -> FeatureSchema:
    """Build and sanity-check a FeatureSchema from parsed YAML."""
    if not isinstance(raw, dict) or "categories" not in raw or "pos" not in raw:
        raise SchemaViolation(f"{where}: schema needs 'categories' and 'pos'")
    categories: dict[str, tuple[str, ...]] = {}
    for cat, values in (raw.get("categories") or {}).items():
        if not values:
            raise SchemaViolation(f"{where}: category '{cat}' has no values")
        values = [str(v) for v in values]
        if len(set(values)) != len(values):
            raise SchemaViolation(f"{where}: category '{cat}' repeats a value")
        categories[str(cat)] = tuple(values)
    pos_tags = tuple(str(p) for p in raw.get("pos") or ())
    if not pos_tags:
        raise SchemaViolation(f"{where}: empty pos inventory")
    value_names: dict[str, dict[str, str]] = {}
    for cat, names in (raw.get("value_names") or {}).items():
        if cat not in categories:
            raise SchemaViolation(f"{where}: value_names for unknown category '{cat}'")
        value_names[cat] = {str(v): str(n) for v, n in names.items()}
        for v in value_names[cat]:
            if v not in categories[cat]:
                raise SchemaViolation(
                    f"{where}: value_names: '{v}' not a value of '{cat}'"
                )
    schema = FeatureSchema(
        categories=categories,
        pos_tags=pos_tags,
        category_names={str(k): str(v) for k, v in (raw.get("category_names") or {}).items()},
        value_names=value_names,
        citation={},
    )
    citation: dict[str, FeatureBundle] = {}
    for pos, feats in (raw.get("citation") or {}).items():
        if pos not in pos_tags:
            raise SchemaViolation(f"{where}: citation for unknown pos '{pos}'")
        bundle = FeatureBundle.of({str(k): str(v) for k, v in (feats or {}).items()})
        try:
            schema.check_bundle(bundle, where=f"{where}: citation[{pos}]")
        except InvalidFeatures as exc:
            raise SchemaViolation(str(exc)) from exc
        citation[pos] = bundle
    object.__setattr__(schema, "citation", citation)
    return schema
