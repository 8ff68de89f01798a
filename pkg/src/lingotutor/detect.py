"""Construct detection over annotated stories.

Every construct definition is matched sentence by sentence against the
surviving token analyses. Pattern constructs anchor their first matcher
anywhere and extend it step by step; government constructs pair a
governor token with the argument realizing the required case, marker or
prepositional frame. A matched token becomes an exercise candidate only
when disambiguation left a single reading for it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pack import ConstructDef, GovernmentPattern, LanguagePack, Matcher
from .pipeline import AnnotatedStory, Chunk, token_matches

ARGUMENT_POS = ("N", "Pron", "Adj")


@dataclass(frozen=True)
class ConstructInstance:
    """One occurrence of a construct inside a story."""

    construct: str
    story: str
    sentence: int
    matched: tuple[int, ...]
    candidates: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "construct": self.construct,
            "sentence": self.sentence,
            "matched": list(self.matched),
            "candidates": list(self.candidates),
        }


def _token_ok(story: AnnotatedStory, index: int, matcher: Matcher,
              pack: LanguagePack, chunks: list[Chunk]) -> bool:
    if not token_matches(story.tokens[index], matcher, pack):
        return False
    if matcher.chunk is not None:
        return any(c.kind == matcher.chunk and c.covers(index) for c in chunks)
    return True


def _nearest(candidates, anchor: int) -> int | None:
    # forward matches win distance ties
    best = None
    for j in candidates:
        key = (abs(j - anchor), 0 if j > anchor else 1)
        if best is None or key < best[0]:
            best = (key, j)
    return best[1] if best else None


def _match_pattern(story: AnnotatedStory, sentence: int, construct: ConstructDef,
                   pack: LanguagePack, chunks: list[Chunk]) -> list[tuple[int, ...]]:
    start, end = story.sentence_range(sentence)
    pattern = construct.pattern
    matches: list[tuple[int, ...]] = []
    for anchor in range(start, end):
        if not _token_ok(story, anchor, pattern[0], pack, chunks):
            continue
        matched = [anchor]
        consumed = {anchor}
        ok = True
        for matcher in pattern[1:]:
            if matcher.anywhere:
                pool = [j for j in range(start, end)
                        if j not in consumed and _token_ok(story, j, matcher, pack, chunks)]
                found = _nearest(pool, matched[-1])
            else:
                j = matched[-1] + 1
                while j < end and not story.tokens[j].is_word:
                    j += 1
                found = j if j < end and _token_ok(story, j, matcher, pack, chunks) else None
            if found is None:
                ok = False
                break
            matched.append(found)
            consumed.add(found)
        if ok:
            matches.append(tuple(matched))
    return matches


def _governor_indices(story: AnnotatedStory, sentence: int, gp: GovernmentPattern,
                      pack: LanguagePack) -> list[int]:
    start, end = story.sentence_range(sentence)
    out = []
    for i in range(start, end):
        for a in story.tokens[i].analyses:
            if gp.pos is not None and a.pos != gp.pos:
                continue
            if gp.governor is not None and a.lemma != gp.governor:
                continue
            if gp.governor_class is not None and not pack.in_class(gp.governor_class, a.lemma):
                continue
            out.append(i)
            break
    return out


def _argument_for(story: AnnotatedStory, sentence: int, governor: int,
                  gp: GovernmentPattern, chunks: list[Chunk]) -> int | None:
    start, end = story.sentence_range(sentence)
    tokens = story.tokens
    if gp.marker is not None:
        pool = [j for j in range(start, end) if tokens[j].surface == gp.marker]
        if gp.direction == "after":
            pool = [j for j in pool if j > governor]
        return _nearest(pool, governor)
    if gp.prep is not None:
        pool = []
        for c in chunks:
            if c.kind != "PrepPhrase":
                continue
            if not any(a.lemma == gp.prep and a.pos == "Adp"
                       for a in tokens[c.start].analyses):
                continue
            if any(a.features.get("Case") == gp.case for a in tokens[c.head].analyses):
                pool.append(c.head)
        if gp.direction == "after":
            pool = [j for j in pool if j > governor]
        return _nearest(pool, governor)
    pool = [j for j in range(start, end)
            if j != governor and any(a.pos in ARGUMENT_POS
                                     and a.features.get("Case") == gp.case
                                     for a in tokens[j].analyses)]
    if gp.direction == "after":
        pool = [j for j in pool if j > governor]
    return _nearest(pool, governor)


def _match_government(story: AnnotatedStory, sentence: int, construct: ConstructDef,
                      pack: LanguagePack, chunks: list[Chunk]) -> list[tuple[int, ...]]:
    gp = next(p for p in pack.government if p.id == construct.government)
    matches = []
    for governor in _governor_indices(story, sentence, gp, pack):
        argument = _argument_for(story, sentence, governor, gp, chunks)
        if argument is not None:
            matches.append((governor, argument))
    return matches


def detect_constructs(story: AnnotatedStory, pack: LanguagePack) -> list[ConstructInstance]:
    """Find every construct instance in an annotated story."""
    instances: list[ConstructInstance] = []
    seen: set[tuple[str, tuple[int, ...]]] = set()
    for sentence in range(len(story.sentences)):
        chunks = story.chunks_in_sentence(sentence)
        for construct in pack.constructs.values():
            if construct.kind == "Government" and construct.government is not None:
                matches = _match_government(story, sentence, construct, pack, chunks)
            elif construct.pattern:
                matches = _match_pattern(story, sentence, construct, pack, chunks)
            else:
                matches = []
            for matched in matches:
                key = (construct.id, matched)
                if key in seen:
                    continue
                seen.add(key)
                candidates = tuple(matched[i] for i in construct.candidates
                                   if story.tokens[matched[i]].chosen is not None)
                instances.append(ConstructInstance(construct.id, story.story_id,
                                                   sentence, matched, candidates))
    instances.sort(key=lambda x: (x.sentence, x.matched, x.construct))
    return instances


def constructs_for_token(instances: list[ConstructInstance], index: int) -> list[str]:
    """Construct ids that offer the given token as an exercise candidate."""
    ids = {inst.construct for inst in instances if index in inst.candidates}
    return sorted(ids)


def story_json(story: AnnotatedStory, instances: list[ConstructInstance]) -> dict:
    """Annotated story JSON with detected construct instances embedded."""
    out = story.to_dict()
    out["constructs"] = [inst.to_dict() for inst in instances]
    return out
