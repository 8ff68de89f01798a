"""Paradigm-table morphology: analysis and generation.

A paradigm is a list of slots; each slot selects one of the lexeme's
stems by index, optionally applies a literal rewrite to it, and appends
a literal suffix. Analysis is the inverse lookup over all realized
forms; both directions share one table, so analyze(generate(x)) always
round-trips by construction of the surface map.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .errors import InvalidFeatures, SchemaViolation, UnknownLemma
from .features import FeatureBundle, FeatureSchema

CEFR_LEVELS = ("A1", "A2", "B1", "B2", "C1", "C2")


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True, slots=True)
class MorphAnalysis:
    """One reading of a surface form."""

    lemma: str
    pos: str
    features: FeatureBundle

    def to_dict(self) -> dict:
        return {"lemma": self.lemma, "pos": self.pos, "features": self.features.to_dict()}


@dataclass(frozen=True, slots=True)
class Slot:
    """One realization rule of a paradigm."""

    features: FeatureBundle
    stem: int = 0
    suffix: str = ""
    rewrite: tuple[str, str] | None = None

    def realize(self, stems: tuple[str, ...]) -> str:
        base = stems[self.stem]
        if self.rewrite is not None:
            old, new = self.rewrite
            idx = base.rfind(old)
            if idx >= 0:
                base = base[:idx] + new + base[idx + len(old):]
        return nfc(base + self.suffix)


@dataclass(frozen=True)
class Paradigm:
    id: str
    pos: str
    slots: tuple[Slot, ...]


@dataclass(frozen=True)
class Lexeme:
    """A dictionary entry: lemma, paradigm assignment and stem list.

    rank is the frequency rank (1 = most frequent, unique per pack).
    links carries lexical relations, e.g. {"pair": "sammua"} for a
    transitivity or aspect pair. gloss is an optional translation used
    by the preview translation stub.
    """

    id: str
    lemma: str
    pos: str
    paradigm: str
    stems: tuple[str, ...]
    rank: int
    gloss: str = ""
    links: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class _Realization:
    lexeme: Lexeme
    slot: Slot
    surface: str

    def analysis(self) -> MorphAnalysis:
        return MorphAnalysis(self.lexeme.lemma, self.lexeme.pos, self.slot.features)


class Morphology:
    """Bidirectional form table for one pack."""

    def __init__(self, schema: FeatureSchema, paradigms: dict[str, Paradigm],
                 lexemes: list[Lexeme]):
        self.schema = schema
        self.paradigms = paradigms
        self.lexemes = list(lexemes)
        self.by_id = {lex.id: lex for lex in self.lexemes}
        self.by_lemma_pos: dict[tuple[str, str], list[Lexeme]] = {}
        self.by_lemma: dict[str, list[Lexeme]] = {}
        self.surface_map: dict[str, list[_Realization]] = {}
        for lex in self.lexemes:
            self.by_lemma_pos.setdefault((lex.lemma, lex.pos), []).append(lex)
            self.by_lemma.setdefault(lex.lemma, []).append(lex)
            paradigm = self.paradigms[lex.paradigm]
            for slot in paradigm.slots:
                surface = slot.realize(lex.stems)
                if not surface:
                    raise SchemaViolation(
                        f"lexeme '{lex.lemma}' ({lex.paradigm}): empty surface "
                        f"for slot {slot.features}"
                    )
                real = _Realization(lex, slot, surface)
                self.surface_map.setdefault(surface, []).append(real)

    # --- public operations ------------------------------------------------

    def analyze(self, surface: str) -> set[MorphAnalysis]:
        """All readings of a surface form; empty set when out of vocabulary."""
        return {r.analysis() for r in self.surface_map.get(nfc(surface), ())}

    def analyze_detailed(self, surface: str) -> list[_Realization]:
        """Like analyze() but keeps lexeme identity, for rank tie-breaks."""
        return list(self.surface_map.get(nfc(surface), ()))

    def generate(self, lemma: str, pos: str, features: FeatureBundle) -> set[str]:
        """All surface forms whose slot features contain the given bundle.

        Raises UnknownLemma when no lexeme matches (lemma, pos) and
        InvalidFeatures when the bundle uses unknown categories/values.
        The result may be empty when the lexeme simply lacks the slot.
        """
        self.schema.check_bundle(features, where=f"generate({lemma})")
        lexemes = self.by_lemma_pos.get((nfc(lemma), pos))
        if not lexemes:
            raise UnknownLemma(f"no lexeme '{lemma}' with pos '{pos}'")
        forms: set[str] = set()
        for lex in lexemes:
            paradigm = self.paradigms[lex.paradigm]
            for slot in paradigm.slots:
                if slot.features.contains(features):
                    forms.add(slot.realize(lex.stems))
        return forms

    def slots_of(self, lexeme: Lexeme) -> tuple[Slot, ...]:
        return self.paradigms[lexeme.paradigm].slots

    def lexeme_rank(self, lemma: str) -> int | None:
        lexs = self.by_lemma.get(lemma)
        if not lexs:
            return None
        return min(l.rank for l in lexs)
