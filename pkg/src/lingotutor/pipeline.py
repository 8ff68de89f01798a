"""Tokenization, sentence splitting, disambiguation and shallow chunking.

The pipeline turns raw text plus a language pack into an AnnotatedStory:
word and punctuation tokens with character offsets, per-sentence
boundaries, agreement-filtered analyses with a chosen reading where the
filtering leaves exactly one, and NounPhrase / PrepPhrase / AnalyticVerb
chunks. Everything downstream (detection, exercises, feedback) consumes
this structure and never re-tokenizes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import EmptyInput
from .morphology import MorphAnalysis, Morphology, _Realization, nfc
from .pack import LanguagePack, Matcher

WORD_RE = re.compile(r"[^\W_]+(?:[-'][^\W_]+)*", re.UNICODE)
TERMINALS = {".", "!", "?", "…"}
CLAUSE_PUNCT = {",", ";", ":"}
PARAGRAPH_RE = re.compile(r"\n[ \t]*\n")

# categories checked by noun phrase agreement
AGREEMENT_CATEGORIES = ("Case", "Number", "Gender")
MODIFIER_POS = {"Adj", "Det", "Num"}
NP_HEAD_POS = {"N"}
CHUNK_HEAD_POS = {"N", "Pron"}


@dataclass(eq=False)
class Token:
    """One surface token with its (possibly filtered) analyses.

    `analyses` holds the readings that survive agreement filtering;
    `chosen` is set when exactly one survives or the frequency-rank
    tie-break picks one. The ambiguity flag is true iff no reading was
    chosen and more than one remains.
    """

    surface: str
    start: int
    end: int
    sentence: int = 0
    analyses: set[MorphAnalysis] = field(default_factory=set)
    chosen: MorphAnalysis | None = None
    ambiguous: bool = False

    @property
    def is_word(self) -> bool:
        return bool(WORD_RE.fullmatch(self.surface))

    def to_dict(self) -> dict:
        ordered = sorted(self.analyses, key=lambda a: (a.lemma, a.pos, a.features.pairs))
        return {
            "surface": self.surface,
            "start": self.start,
            "end": self.end,
            "sentence": self.sentence,
            "analyses": [a.to_dict() for a in ordered],
            "chosen": self.chosen.to_dict() if self.chosen else None,
            "ambiguous": self.ambiguous,
        }


@dataclass(frozen=True)
class Chunk:
    """A shallow phrase: kind, inclusive token index span, head index.

    For AnalyticVerb chunks `steps` lists the token indices matched by
    the pattern steps; a chunk with gaps has fewer steps than spanned
    tokens.
    """

    kind: str
    start: int
    end: int
    head: int
    steps: tuple[int, ...] = ()

    def covers(self, index: int) -> bool:
        return self.start <= index <= self.end

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "start": self.start, "end": self.end, "head": self.head}
        if self.kind == "AnalyticVerb":
            out["steps"] = list(self.steps)
        return out


@dataclass
class AnnotatedStory:
    story_id: str
    text: str
    tokens: list[Token]
    sentences: list[tuple[int, int]]
    paragraphs: list[tuple[int, int]]
    chunks: list[Chunk]

    def sentence_tokens(self, index: int) -> list[Token]:
        start, end = self.sentences[index]
        return self.tokens[start:end]

    def sentence_range(self, index: int) -> tuple[int, int]:
        return self.sentences[index]

    def sentence_text(self, index: int) -> str:
        start, end = self.sentences[index]
        if start >= end:
            return ""
        return self.text[self.tokens[start].start:self.tokens[end - 1].end]

    def chunks_in_sentence(self, index: int) -> list[Chunk]:
        start, end = self.sentences[index]
        return [c for c in self.chunks if start <= c.start and c.end < end]

    def to_dict(self) -> dict:
        return {
            "story": self.story_id,
            "text": self.text,
            "sentences": [list(s) for s in self.sentences],
            "paragraphs": [list(p) for p in self.paragraphs],
            "tokens": [t.to_dict() for t in self.tokens],
            "chunks": [c.to_dict() for c in self.chunks],
        }


# --- tokenization -----------------------------------------------------------


def tokenize(text: str, abbreviations: tuple[str, ...] = ()) -> tuple[list[Token], list[tuple[int, int]]]:
    """Split text into tokens and sentence boundaries.

    Words are maximal letter/digit runs (internal hyphens allowed), every
    other non-space character is its own token. Sentences end after
    terminal punctuation; dots inside listed abbreviations do not split,
    but an abbreviation followed by a capitalized token does (the
    capitalization heuristic). Raises EmptyInput on whitespace-only text.
    """
    if not text or not text.strip():
        raise EmptyInput("no text to tokenize")
    abbrevs = sorted((nfc(a) for a in abbreviations), key=len, reverse=True)
    tokens: list[Token] = []
    is_abbrev: list[bool] = []
    pos = 0
    length = len(text)
    while pos < length:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        matched_abbrev = None
        for abbrev in abbrevs:
            end = pos + len(abbrev)
            if text.startswith(abbrev, pos) and (end >= length or not text[end].isalnum()):
                matched_abbrev = abbrev
                break
        if matched_abbrev is not None:
            tokens.append(Token(text[pos:pos + len(matched_abbrev)], pos, pos + len(matched_abbrev)))
            is_abbrev.append(True)
            pos += len(matched_abbrev)
            continue
        word = WORD_RE.match(text, pos)
        if word:
            tokens.append(Token(word.group(), word.start(), word.end()))
            is_abbrev.append(False)
            pos = word.end()
            continue
        tokens.append(Token(ch, pos, pos + 1))
        is_abbrev.append(False)
        pos += 1

    sentences: list[tuple[int, int]] = []
    first = 0
    for i, token in enumerate(tokens):
        boundary = False
        if token.surface in TERMINALS:
            nxt = tokens[i + 1].surface if i + 1 < len(tokens) else ""
            boundary = nxt not in TERMINALS
        elif is_abbrev[i] and i + 1 < len(tokens) and tokens[i + 1].surface[:1].isupper():
            boundary = True
        if boundary:
            sentences.append((first, i + 1))
            first = i + 1
    if first < len(tokens):
        sentences.append((first, len(tokens)))
    for index, (start, end) in enumerate(sentences):
        for token in tokens[start:end]:
            token.sentence = index
    return tokens, sentences


def _paragraph_ranges(text: str, tokens: list[Token],
                      sentences: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Group sentences into paragraphs split on blank lines."""
    if not sentences:
        return []
    breaks = [m.start() for m in PARAGRAPH_RE.finditer(text)]
    ranges: list[tuple[int, int]] = []
    first = 0
    for index in range(1, len(sentences)):
        prev_end = tokens[sentences[index - 1][1] - 1].end
        this_start = tokens[sentences[index][0]].start
        if any(prev_end <= b < this_start for b in breaks):
            ranges.append((first, index))
            first = index
    ranges.append((first, len(sentences)))
    return ranges


# --- analysis lookup --------------------------------------------------------


def lookup_realizations(morph: Morphology, surface: str) -> list[_Realization]:
    """Surface lookup with a first-letter lowercase fallback.

    Capitalized out-of-vocabulary forms (typically sentence-initial) are
    retried with the first character lowercased.
    """
    reals = morph.analyze_detailed(surface)
    if not reals and surface[:1].isupper():
        folded = surface[0].lower() + surface[1:]
        reals = morph.analyze_detailed(folded)
    return reals


# --- disambiguation ---------------------------------------------------------


def _agrees(a: MorphAnalysis, b: MorphAnalysis, categories=AGREEMENT_CATEGORIES) -> bool:
    for cat in categories:
        va, vb = a.features.get(cat), b.features.get(cat)
        if va is not None and vb is not None and va != vb:
            return False
    return True


def _filter_noun_phrases(reals: list[list[_Realization]]) -> None:
    """Mutual modifier/head agreement filtering within one sentence.

    For every noun preceded by a run of determiner/adjective/numeral
    tokens, keep modifier readings compatible with some head reading and
    head readings compatible with every modifier. The whole group is
    left untouched when filtering would empty any member (the veto).
    """
    n = len(reals)
    for k in range(n):
        if not any(r.lexeme.pos in NP_HEAD_POS for r in reals[k]):
            continue
        j = k
        while j > 0 and any(r.lexeme.pos in MODIFIER_POS for r in reals[j - 1]):
            j -= 1
        if j == k:
            continue
        head_orig = list(reals[k])
        mods_orig = [list(reals[m]) for m in range(j, k)]
        new_mods = []
        for mod in mods_orig:
            kept = [r for r in mod
                    if any(_agrees(r.analysis(), h.analysis()) for h in head_orig)]
            new_mods.append(kept)
        new_head = [h for h in head_orig
                    if all(any(_agrees(h.analysis(), r.analysis()) for r in mod)
                           for mod in mods_orig)]
        if not new_head or any(not kept for kept in new_mods):
            continue
        reals[k] = new_head
        for offset, kept in enumerate(new_mods):
            reals[j + offset] = kept


def _is_finite(r: _Realization) -> bool:
    return r.lexeme.pos == "V" and r.slot.features.get("VerbForm") == "Fin"


def _filter_verb_agreement(reals: list[list[_Realization]]) -> None:
    """Filter finite verb readings by the nearest preceding Nom subject.

    Person and Number are compared only where both the verb reading and
    a nominative noun/pronoun reading of the subject mark them. Nothing
    changes when no subject precedes or all finite readings would drop.
    """
    n = len(reals)
    for k in range(n):
        finites = [r for r in reals[k] if _is_finite(r)]
        if not finites:
            continue
        subject = None
        for j in range(k - 1, -1, -1):
            noms = [r for r in reals[j]
                    if r.lexeme.pos in ("N", "Pron")
                    and r.slot.features.get("Case") == "Nom"]
            if noms:
                subject = noms
                break
        if subject is None:
            continue
        kept = [r for r in finites
                if any(_agrees(r.analysis(), s.analysis(), ("Person", "Number"))
                       for s in subject)]
        if not kept:
            continue
        reals[k] = [r for r in reals[k] if not _is_finite(r) or r in kept]


def _pick_chosen(token: Token, survivors: list[_Realization]) -> None:
    token.analyses = {r.analysis() for r in survivors}
    if len(token.analyses) == 1:
        token.chosen = next(iter(token.analyses))
    else:
        lemmas = {r.lexeme.lemma for r in survivors}
        lexemes = {r.lexeme.id: r.lexeme for r in survivors}
        if len(lemmas) == 1 and len(lexemes) > 1:
            best = min(lexemes.values(), key=lambda lex: lex.rank)
            narrowed = {r.analysis() for r in survivors if r.lexeme.id == best.id}
            if len(narrowed) == 1:
                token.chosen = next(iter(narrowed))
    token.ambiguous = token.chosen is None and len(token.analyses) > 1


def disambiguate(tokens: list[Token], pack: LanguagePack) -> list[Token]:
    """Attach agreement-filtered analyses and choose unique readings.

    Runs noun phrase agreement, then finite-verb subject agreement, then
    the frequency-rank tie-break for readings that share a single lemma
    across different lexemes. Mutates and returns the token list.
    """
    morph = pack.morphology
    by_sentence: dict[int, list[int]] = {}
    for i, token in enumerate(tokens):
        by_sentence.setdefault(token.sentence, []).append(i)
    for indices in by_sentence.values():
        reals = [lookup_realizations(morph, tokens[i].surface) if tokens[i].is_word else []
                 for i in indices]
        _filter_noun_phrases(reals)
        _filter_verb_agreement(reals)
        for offset, i in enumerate(indices):
            _pick_chosen(tokens[i], reals[offset])
    return tokens


# --- chunking ---------------------------------------------------------------


def _has_pos(token: Token, pos_tags) -> bool:
    return any(a.pos in pos_tags for a in token.analyses)


def _case_compatible(mod: Token, head: Token) -> bool:
    return any(_agrees(m, h, ("Case",))
               for m in mod.analyses for h in head.analyses)


def token_matches(token: Token, matcher: Matcher, pack: LanguagePack) -> bool:
    """Conjunctive matcher test, existential over surviving analyses."""
    if matcher.surface is not None and token.surface != matcher.surface:
        return False
    if matcher.surface_re is not None and not matcher.surface_re.search(token.surface):
        return False
    needs_analysis = (matcher.lemma is not None or matcher.lemma_class is not None
                      or matcher.pos is not None or matcher.features)
    if not needs_analysis:
        return True
    for analysis in token.analyses:
        if matcher.lemma is not None and analysis.lemma != matcher.lemma:
            continue
        if matcher.lemma_class is not None and not pack.in_class(matcher.lemma_class, analysis.lemma):
            continue
        if matcher.pos is not None and analysis.pos != matcher.pos:
            continue
        if any(analysis.features.get(cat) not in values for cat, values in matcher.features):
            continue
        return True
    return False


def _noun_phrases(tokens: list[Token], base: int) -> list[Chunk]:
    chunks: list[Chunk] = []
    claimed: set[int] = set()
    for k, token in enumerate(tokens):
        if k in claimed or not _has_pos(token, CHUNK_HEAD_POS):
            continue
        j = k
        while j > 0 and (j - 1) not in claimed and _has_pos(tokens[j - 1], MODIFIER_POS) \
                and not _has_pos(tokens[j - 1], CHUNK_HEAD_POS) \
                and _case_compatible(tokens[j - 1], token):
            j -= 1
        chunks.append(Chunk("NounPhrase", base + j, base + k, base + k))
        claimed.update(range(j, k + 1))
    return chunks


def _prep_phrases(tokens: list[Token], base: int, nps: list[Chunk]) -> list[Chunk]:
    np_by_start = {c.start: c for c in nps}
    chunks: list[Chunk] = []
    for k, token in enumerate(tokens):
        if not _has_pos(token, ("Adp",)):
            continue
        np = np_by_start.get(base + k + 1)
        if np is not None:
            chunks.append(Chunk("PrepPhrase", base + k, np.end, np.head))
    return chunks


def _is_punct(token: Token) -> bool:
    return not token.is_word


def _analytic_verbs(tokens: list[Token], base: int, pack: LanguagePack) -> list[Chunk]:
    """Match pack analytic patterns left to right; earlier patterns win.

    Steps skip punctuation; a gap pattern may also skip words but stops
    at clause punctuation. Spans already claimed by a chunk are skipped.
    """
    chunks: list[Chunk] = []
    taken: set[int] = set()
    for pattern in pack.analytic:
        for start in range(len(tokens)):
            if start in taken or not token_matches(tokens[start], pattern.steps[0], pack):
                continue
            matched = [start]
            head_at = 0 if pattern.steps[0].head else None
            pos = start + 1
            ok = True
            for step_index, step in enumerate(pattern.steps[1:], start=1):
                found = None
                scan = pos
                while scan < len(tokens):
                    tok = tokens[scan]
                    if _is_punct(tok):
                        if pattern.gap and tok.surface in CLAUSE_PUNCT:
                            break
                        scan += 1
                        continue
                    if token_matches(tok, step, pack):
                        found = scan
                        break
                    if not pattern.gap:
                        break
                    scan += 1
                if found is None:
                    ok = False
                    break
                matched.append(found)
                if step.head:
                    head_at = step_index
                pos = found + 1
            if not ok:
                continue
            span = set(range(matched[0], matched[-1] + 1))
            if span & taken:
                continue
            head = matched[head_at if head_at is not None else -1]
            chunks.append(Chunk("AnalyticVerb", base + matched[0], base + matched[-1],
                                base + head, tuple(base + m for m in matched)))
            taken.update(span)
    chunks.sort(key=lambda c: c.start)
    return chunks


def chunk(tokens: list[Token], pack: LanguagePack,
          sentences: list[tuple[int, int]]) -> list[Chunk]:
    """Shallow chunks per sentence: noun, preposition and analytic verb."""
    chunks: list[Chunk] = []
    for start, end in sentences:
        sent = tokens[start:end]
        nps = _noun_phrases(sent, start)
        chunks.extend(nps)
        chunks.extend(_prep_phrases(sent, start, nps))
        chunks.extend(_analytic_verbs(sent, start, pack))
    chunks.sort(key=lambda c: (c.start, c.kind))
    return chunks


# --- top level --------------------------------------------------------------


def annotate(pack: LanguagePack, text: str, story_id: str = "story") -> AnnotatedStory:
    """Run the full pipeline over one text."""
    text = nfc(text)
    tokens, sentences = tokenize(text, pack.abbreviations)
    disambiguate(tokens, pack)
    chunks = chunk(tokens, pack, sentences)
    paragraphs = _paragraph_ranges(text, tokens, sentences)
    return AnnotatedStory(story_id, text, tokens, sentences, paragraphs, chunks)
