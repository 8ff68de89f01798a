"""Exercise candidates and cloze / multiple choice builders.

Candidates come from detected construct instances: one per distinct
token or span, in story order, with ambiguous tokens excluded. A token
candidate that falls inside a span candidate is merged into it so each
blank is practiced once, under the union of its linked constructs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .detect import ConstructInstance
from .errors import RecipeFailed
from .morphology import MorphAnalysis, nfc
from .pack import ConstructDef, LanguagePack
from .pipeline import AnnotatedStory


@dataclass(frozen=True)
class ExerciseCandidate:
    """A blankable token or span with its construct links."""

    story: str
    span: tuple[int, int]
    head: int
    answer: str
    head_surface: str
    head_offset: int
    head_analysis: MorphAnalysis
    hint_lemma: str
    sentence: int
    sentence_initial: bool
    links: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "story": self.story,
            "span": list(self.span),
            "head": self.head,
            "answer": self.answer,
            "hint_lemma": self.hint_lemma,
            "sentence": self.sentence,
            "links": list(self.links),
        }


@dataclass(frozen=True)
class Exercise:
    """One practice item over a candidate."""

    id: str
    kind: str
    candidate: ExerciseCandidate
    construct: str | None = None
    options: tuple[str, ...] = ()
    correct: int | None = None
    hints: tuple = ()

    def with_hints(self, hints: tuple) -> "Exercise":
        return replace(self, hints=hints)


@dataclass
class _Entry:
    span: tuple[int, int]
    head: int
    links: set[str] = field(default_factory=set)
    from_span: bool = False


def _gapless_chunk(story: AnnotatedStory, index: int):
    for c in story.chunks:
        if c.kind == "AnalyticVerb" and c.covers(index) \
                and len(c.steps) == c.end - c.start + 1:
            return c
    return None


def generate_candidates(story: AnnotatedStory, instances: list[ConstructInstance],
                        pack: LanguagePack) -> list[ExerciseCandidate]:
    """Derive merged, story-ordered exercise candidates."""
    entries: dict[tuple[int, int], _Entry] = {}

    def add(span: tuple[int, int], head: int, construct: str, from_span: bool) -> None:
        entry = entries.get(span)
        if entry is None:
            entries[span] = _Entry(span, head, {construct}, from_span)
            return
        entry.links.add(construct)
        if from_span and not entry.from_span:
            entry.head = head
            entry.from_span = True

    for inst in instances:
        construct = pack.constructs[inst.construct]
        if construct.candidate_mode == "span":
            head_pos = construct.head if construct.head is not None else len(inst.matched) - 1
            head = inst.matched[head_pos]
            if story.tokens[head].chosen is None:
                continue
            span = (min(inst.matched), max(inst.matched))
            add(span, head, inst.construct, True)
            continue
        for index in inst.candidates:
            if construct.candidate_mode == "chunk":
                chunk = _gapless_chunk(story, index)
                if chunk is not None and story.tokens[chunk.head].chosen is not None:
                    add((chunk.start, chunk.end), chunk.head, inst.construct, True)
                    continue
            add((index, index), index, inst.construct, False)

    # absorb token candidates into any span that contains them
    ordered = sorted(entries.values(), key=lambda e: (e.span[1] - e.span[0], e.span))
    for entry in list(ordered):
        for other in ordered:
            if other is entry:
                continue
            if other.span[0] <= entry.span[0] and entry.span[1] <= other.span[1] \
                    and other.span != entry.span:
                other.links |= entry.links
                entries.pop(entry.span, None)
                break

    out = []
    for entry in sorted(entries.values(), key=lambda e: e.span):
        start, end = entry.span
        head_tok = story.tokens[entry.head]
        if head_tok.chosen is None:
            continue
        first = story.tokens[start]
        answer = story.text[first.start:story.tokens[end].end]
        sent_start = story.sentences[first.sentence][0]
        out.append(ExerciseCandidate(
            story=story.story_id,
            span=entry.span,
            head=entry.head,
            answer=answer,
            head_surface=head_tok.surface,
            head_offset=head_tok.start - first.start,
            head_analysis=head_tok.chosen,
            hint_lemma=head_tok.chosen.lemma,
            sentence=first.sentence,
            sentence_initial=start == sent_start,
            links=tuple(sorted(entry.links)),
        ))
    return out


# --- builders ---------------------------------------------------------------


def build_cloze(candidate: ExerciseCandidate) -> Exercise:
    start, end = candidate.span
    return Exercise(
        id=f"{candidate.story}:{start}-{end}:cloze",
        kind="cloze",
        candidate=candidate,
    )


def _splice(candidate: ExerciseCandidate, form: str) -> str:
    at = candidate.head_offset
    if at == 0 and candidate.sentence_initial and candidate.answer[:1].isupper() and form:
        form = form[0].upper() + form[1:]
    return candidate.answer[:at] + form + candidate.answer[at + len(candidate.head_surface):]


def _feature_variants(candidate: ExerciseCandidate, recipe, pack: LanguagePack) -> list[str]:
    base = candidate.head_analysis
    out = []
    for value in recipe.values:
        bundle = base.features.with_value(recipe.category, value)
        forms = pack.morphology.generate(base.lemma, base.pos, bundle)
        out.extend(_splice(candidate, f) for f in sorted(forms))
    return out


def _pair_variants(candidate: ExerciseCandidate, recipe, pack: LanguagePack) -> list[str]:
    base = candidate.head_analysis
    partner = None
    for lexeme in sorted(pack.morphology.lexemes, key=lambda lx: lx.rank):
        if lexeme.lemma == base.lemma and lexeme.pos == base.pos and "pair" in lexeme.links:
            partner = lexeme.links["pair"]
            break
    if partner is None:
        return []
    bundle = base.features.without(*recipe.ignore)
    forms = pack.morphology.generate(partner, base.pos, bundle)
    return [_splice(candidate, f) for f in sorted(forms)]


def _orthography_variants(candidate: ExerciseCandidate, recipe) -> list[str]:
    out = []
    for chain in recipe.variants:
        text = candidate.answer
        for old, new in chain:
            text = text.replace(old, new)
        out.append(text)
    return out


def build_mc(candidate: ExerciseCandidate, construct: ConstructDef,
             pack: LanguagePack, seed: int) -> Exercise:
    """Multiple choice over recipe distractors; raises RecipeFailed."""
    if construct.recipe is None:
        raise RecipeFailed(f"construct '{construct.id}' has no distractor recipe")
    recipe = pack.recipes[construct.recipe]
    if recipe.strategy == "FeatureVariation":
        raw = _feature_variants(candidate, recipe, pack)
    elif recipe.strategy == "LemmaPairSwap":
        raw = _pair_variants(candidate, recipe, pack)
    else:
        raw = _orthography_variants(candidate, recipe)
    options = [candidate.answer]
    for text in raw:
        if text not in options and not answer_matches(candidate, text):
            options.append(text)
    options = options[:max(2, min(recipe.count, 5))]
    if len(options) < 2:
        raise RecipeFailed(f"recipe '{recipe.id}' yields no distractors for '{candidate.answer}'")
    rng = random.Random(seed)
    rng.shuffle(options)
    return Exercise(
        id=f"{candidate.story}:{candidate.span[0]}-{candidate.span[1]}:mc:{construct.id}",
        kind="mc",
        candidate=candidate,
        construct=construct.id,
        options=tuple(options),
        correct=options.index(candidate.answer),
    )


def answer_matches(candidate: ExerciseCandidate, given: str) -> bool:
    """Compare a typed answer with the blanked text.

    Unicode-normalized, inner whitespace collapsed; the first letter is
    case-folded when the blank opens its sentence.
    """
    want = " ".join(nfc(candidate.answer).split())
    got = " ".join(nfc(given).split())
    if got == want:
        return True
    if candidate.sentence_initial and got and want:
        return got[0].lower() + got[1:] == want[0].lower() + want[1:]
    return False
