"""Graded hints, answer diagnosis and paraphrase generation.

Hint sequences run from vague to explicit: construct context lines
first, then one line per feature category that distinguishes the target
form from its citation form, then the explicit value list, then an
optional paraphrase. Wrong answers are diagnosed by the most charitable
reading of what the learner typed, and the next hint may skip ahead to
the first mismatched category but never backward.
"""

from __future__ import annotations

from dataclasses import dataclass

from .detect import ConstructInstance
from .errors import GenerationGap
from .exercises import ExerciseCandidate
from .morphology import MorphAnalysis
from .pack import ConstructDef, LanguagePack
from .pipeline import AnnotatedStory, Token, lookup_realizations


@dataclass(frozen=True)
class Hint:
    level: int
    text: str
    target: int | None = None
    category: str | None = None

    def to_dict(self) -> dict:
        return {"level": self.level, "text": self.text, "target": self.target}


@dataclass(frozen=True)
class AnswerDiff:
    """Charitable comparison of a typed answer against the target form."""

    given: str
    oov: bool
    lemma_match: bool
    mismatches: tuple[tuple[str, str, str | None], ...]

    @property
    def empty(self) -> bool:
        return not self.oov and not self.mismatches

    def summary(self, pack: LanguagePack) -> str:
        if self.oov:
            return "That form is not recognized."
        if not self.mismatches:
            return "The form matches."
        parts = []
        for cat, expected, got in self.mismatches:
            want = pack.schema.value_name(cat, expected)
            if got is None:
                parts.append(f"{want} is missing")
            else:
                parts.append(f"{pack.schema.value_name(cat, got)} instead of {want}")
        return "Check the form: " + "; ".join(parts) + "."

    def to_dict(self, pack: LanguagePack) -> dict:
        return {
            "given": self.given,
            "oov": self.oov,
            "lemma_match": self.lemma_match,
            "mismatches": [list(m) for m in self.mismatches],
            "summary": self.summary(pack),
        }


def _token_lemma(token: Token) -> str:
    if token.chosen is not None:
        return token.chosen.lemma
    lemmas = {a.lemma for a in token.analyses}
    return lemmas.pop() if len(lemmas) == 1 else token.surface


def _ordered_categories(features, pos: str, pack: LanguagePack) -> list[str]:
    order = list(pack.hierarchy_for(pos))
    cats = set(features.categories())
    ordered = [c for c in order if c in cats]
    ordered.extend(sorted(cats - set(order)))
    return ordered


def generate_paraphrase(construct: ConstructDef, instance: ConstructInstance,
                        story: AnnotatedStory, pack: LanguagePack) -> str:
    """Realize the construct's paraphrase template for one instance.

    Slot elements regenerate the matched token's lemma with the template
    features; a lemma that lacks the requested form raises GenerationGap.
    """
    pieces = []
    for element in construct.paraphrase:
        if element.text is not None:
            pieces.append(element.text)
            continue
        token = story.tokens[instance.matched[element.slot]]
        analysis = token.chosen or next(iter(token.analyses), None)
        if analysis is None:
            raise GenerationGap(f"no analysis for paraphrase slot {element.slot}")
        forms = pack.morphology.generate(analysis.lemma, analysis.pos, element.features)
        if not forms:
            raise GenerationGap(
                f"'{analysis.lemma}' has no form {element.features} for the paraphrase")
        pieces.append(sorted(forms)[0])
    return " ".join(pieces)


def _instance_for(construct_id: str, candidate: ExerciseCandidate,
                  instances: list[ConstructInstance]) -> ConstructInstance | None:
    start, end = candidate.span
    for inst in instances:
        if inst.construct != construct_id:
            continue
        if any(start <= t <= end for t in inst.candidates) \
                or any(start <= t <= end for t in inst.matched):
            return inst
    return None


def build_hint_sequence(candidate: ExerciseCandidate, instances: list[ConstructInstance],
                        story: AnnotatedStory, pack: LanguagePack) -> tuple[Hint, ...]:
    """Assemble the graded hint list for one exercise candidate."""
    hints: list[Hint] = []

    def push(text: str, target: int | None = None, category: str | None = None) -> None:
        hints.append(Hint(len(hints), text, target, category))

    paraphrase_text = None
    for construct_id in candidate.links:
        construct = pack.constructs[construct_id]
        instance = _instance_for(construct_id, candidate, instances)
        if instance is None:
            continue
        fmt: dict[str, str] = {}
        for i, t in enumerate(instance.matched):
            fmt[f"lemma{i}"] = _token_lemma(story.tokens[t])
            fmt[f"surface{i}"] = story.tokens[t].surface
        if construct.context_hint:
            push(construct.context_hint.format(**fmt), target=instance.matched[0])
        if construct.paraphrase and paraphrase_text is None:
            try:
                paraphrase_text = generate_paraphrase(construct, instance, story, pack)
            except GenerationGap:
                paraphrase_text = None

    analysis = candidate.head_analysis
    citation = pack.schema.citation_for(analysis.pos)
    distinguishing = [cat for cat in _ordered_categories(analysis.features, analysis.pos, pack)
                      if citation.get(cat) != analysis.features.get(cat)]
    for cat in distinguishing:
        push(f"Use another {pack.schema.category_name(cat)}.",
             target=candidate.head, category=cat)
    if distinguishing:
        values = ", ".join(pack.schema.value_name(cat, analysis.features.get(cat))
                           for cat in distinguishing)
        push(f"Use {values}.", target=candidate.head)
    elif not hints:
        # citation-form answers: the lemma itself is the distinguishing fact
        push(f"Use a form of '{candidate.hint_lemma}'.", target=candidate.head)
    if paraphrase_text is not None:
        push(f"This is equivalent to '{paraphrase_text}'.")
    return tuple(hints)


def diagnose_answer(candidate: ExerciseCandidate, given: str,
                    pack: LanguagePack) -> AnswerDiff:
    """Diagnose a wrong answer against the expected head analysis.

    The most charitable reading wins: analyses of the expected lemma are
    preferred, then the fewest feature mismatches. Unanalyzable input
    just sets the oov flag.
    """
    expected = candidate.head_analysis
    words = given.strip().split()
    answer_words = candidate.answer.split()
    head_at = len(candidate.answer[:candidate.head_offset].split())
    if len(words) == len(answer_words) and head_at < len(words):
        word = words[head_at]
    else:
        word = words[-1] if words else ""
    reals = lookup_realizations(pack.morphology, word) if word else []
    analyses = sorted({r.analysis() for r in reals},
                      key=lambda a: (a.lemma, a.pos, a.features.pairs))
    if not analyses:
        return AnswerDiff(given, True, False, ())

    def mismatches(a: MorphAnalysis) -> tuple[tuple[str, str, str | None], ...]:
        cats = _ordered_categories(expected.features, expected.pos, pack)
        out = []
        for cat in cats:
            want = expected.features.get(cat)
            got = a.features.get(cat)
            if want != got:
                out.append((cat, want, got))
        return tuple(out)

    preferred = [a for a in analyses if a.lemma == expected.lemma] or analyses
    best = min(preferred, key=lambda a: len(mismatches(a)))
    return AnswerDiff(given, False, best.lemma == expected.lemma, mismatches(best))


def next_hint(hints: tuple[Hint, ...], pointer: int,
              diff: AnswerDiff | None = None) -> Hint | None:
    """Pick the next hint at or past the pointer, skipping ahead to the
    first diagnosed mismatch category when that lies further on."""
    if pointer >= len(hints):
        return None
    if diff is not None and diff.mismatches:
        first_cat = diff.mismatches[0][0]
        for hint in hints:
            if hint.category == first_cat and hint.level >= pointer:
                return hint
    return hints[pointer]
