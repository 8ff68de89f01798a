"""Language pack model and loader.

A pack is a directory of UTF-8 YAML documents listed by manifest.yaml;
the exact file names and shapes are documented in docs/pack-format.md.
Loading validates every cross-reference and realizes every paradigm
slot for every lexeme, so a pack that loads is internally consistent.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import DanglingReference, InvalidFeatures, MissingFile, SchemaViolation
from .features import FeatureBundle, FeatureSchema, schema_from_dict
from .morphology import CEFR_LEVELS, Lexeme, Morphology, Paradigm, Slot, nfc

PACK_FILES = ("schema", "paradigms", "lexicon", "government", "constructs", "hierarchy")

CONSTRUCT_KINDS = ("MorphFeature", "Government", "Construction", "LemmaClass", "Orthography")
CANDIDATE_MODES = ("token", "chunk", "span")
RECIPE_STRATEGIES = ("FeatureVariation", "LemmaPairSwap", "OrthographyVariants")


# --- pack component types ---------------------------------------------------


@dataclass(frozen=True)
class LemmaClass:
    """A named set of lemmas, by member list and/or lemma regex."""

    id: str
    pos: str | None = None
    members: tuple[str, ...] = ()
    pattern: re.Pattern | None = None

    def matches(self, lemma: str) -> bool:
        if lemma in self.members:
            return True
        return bool(self.pattern and self.pattern.search(lemma))


@dataclass(frozen=True)
class GovernmentPattern:
    """One government requirement of a governor lemma (or class).

    Either `case` (with optional `prep`) or `marker` is set: the
    argument is a token in the required case, possibly inside a
    prepositional phrase, or the literal subordinate-clause marker.
    direction "free" searches the whole sentence, "after" only to the
    right of the governor.
    """

    id: str
    governor: str | None
    governor_class: str | None
    pos: str | None
    case: str | None = None
    prep: str | None = None
    marker: str | None = None
    direction: str = "free"


@dataclass(frozen=True)
class Matcher:
    """One conjunctive token constraint inside a construct pattern."""

    lemma: str | None = None
    lemma_class: str | None = None
    pos: str | None = None
    features: tuple[tuple[str, tuple[str, ...]], ...] = ()
    surface: str | None = None
    surface_re: re.Pattern | None = None
    chunk: str | None = None
    anywhere: bool = False
    head: bool = False


@dataclass(frozen=True)
class ParaphraseElement:
    """Either a literal text piece or a regenerated matcher slot."""

    text: str | None = None
    slot: int | None = None
    features: FeatureBundle | None = None


@dataclass(frozen=True)
class DistractorRecipe:
    id: str
    strategy: str
    category: str | None = None
    values: tuple[str, ...] = ()
    ignore: tuple[str, ...] = ()
    variants: tuple[tuple[tuple[str, str], ...], ...] = ()
    count: int = 4


@dataclass(frozen=True)
class ConstructDef:
    """A detectable linguistic construct with its teaching metadata."""

    id: str
    kind: str
    name: str
    cefr: str
    pattern: tuple[Matcher, ...] = ()
    government: str | None = None
    candidates: tuple[int, ...] = ()
    candidate_mode: str = "token"
    head: int | None = None
    context_hint: str | None = None
    paraphrase: tuple[ParaphraseElement, ...] = ()
    recipe: str | None = None


@dataclass(frozen=True)
class AnalyticPattern:
    """Auxiliary + participle pattern that forms an AnalyticVerb chunk."""

    id: str
    steps: tuple[Matcher, ...]
    gap: bool = False


@dataclass
class LanguagePack:
    language: str
    name: str
    path: Path
    schema: FeatureSchema
    morphology: Morphology
    classes: dict[str, LemmaClass]
    government: list[GovernmentPattern]
    constructs: dict[str, ConstructDef]
    recipes: dict[str, DistractorRecipe]
    analytic: list[AnalyticPattern]
    hierarchy: dict[str, tuple[str, ...]]
    abbreviations: tuple[str, ...] = ()

    def government_for(self, lemma: str) -> list[GovernmentPattern]:
        found = []
        for pat in self.government:
            if pat.governor is not None and pat.governor == lemma:
                found.append(pat)
            elif pat.governor_class is not None and self.classes[pat.governor_class].matches(lemma):
                found.append(pat)
        return found

    def hierarchy_for(self, pos: str) -> tuple[str, ...]:
        return self.hierarchy.get(pos, ())

    def in_class(self, class_id: str, lemma: str) -> bool:
        cls = self.classes.get(class_id)
        return bool(cls and cls.matches(lemma))


# --- loader -----------------------------------------------------------------


def _norm(value):
    """Recursively NFC-normalize all strings in parsed YAML."""
    if isinstance(value, str):
        return nfc(value)
    if isinstance(value, list):
        return [_norm(v) for v in value]
    if isinstance(value, dict):
        return {_norm(k): _norm(v) for k, v in value.items()}
    return value


def _read_yaml(path: Path) -> dict:
    if not path.is_file():
        raise MissingFile(f"missing pack file: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise SchemaViolation(f"{path.name}: not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise SchemaViolation(f"{path.name}: top level must be a mapping")
    return _norm(raw)


def _bundle(raw: dict | None, schema: FeatureSchema, where: str) -> FeatureBundle:
    bundle = FeatureBundle.of({str(k): str(v) for k, v in (raw or {}).items()})
    try:
        schema.check_bundle(bundle, where=where)
    except InvalidFeatures as exc:
        raise DanglingReference(str(exc)) from exc
    return bundle


def _load_paradigms(raw: dict, schema: FeatureSchema, where: str) -> dict[str, Paradigm]:
    paradigms: dict[str, Paradigm] = {}
    for entry in raw.get("paradigms") or ():
        pid = str(entry.get("id", ""))
        if not pid:
            raise SchemaViolation(f"{where}: paradigm without id")
        if pid in paradigms:
            raise SchemaViolation(f"{where}: duplicate paradigm id '{pid}'")
        pos = str(entry.get("pos", ""))
        try:
            schema.check_pos(pos, where=f"{where}: paradigm '{pid}'")
        except InvalidFeatures as exc:
            raise DanglingReference(str(exc)) from exc
        slots = []
        seen_bundles = set()
        for i, slot_raw in enumerate(entry.get("slots") or ()):
            bundle = _bundle(slot_raw.get("features"), schema, f"{where}: paradigm '{pid}' slot {i}")
            if bundle in seen_bundles:
                raise SchemaViolation(
                    f"{where}: paradigm '{pid}': duplicate slot features {bundle}"
                )
            seen_bundles.add(bundle)
            rewrite = slot_raw.get("rewrite")
            if rewrite is not None:
                if not (isinstance(rewrite, list) and len(rewrite) == 2):
                    raise SchemaViolation(
                        f"{where}: paradigm '{pid}' slot {i}: rewrite must be [old, new]"
                    )
                rewrite = (str(rewrite[0]), str(rewrite[1]))
            slots.append(Slot(
                features=bundle,
                stem=int(slot_raw.get("stem", 0)),
                suffix=str(slot_raw.get("suffix", "")),
                rewrite=rewrite,
            ))
        if not slots:
            raise SchemaViolation(f"{where}: paradigm '{pid}' has no slots")
        paradigms[pid] = Paradigm(id=pid, pos=pos, slots=tuple(slots))
    if not paradigms:
        raise SchemaViolation(f"{where}: no paradigms defined")
    return paradigms


def _load_lexicon(raw: dict, schema: FeatureSchema, paradigms: dict[str, Paradigm],
                  where: str) -> tuple[list[Lexeme], dict[str, LemmaClass]]:
    lexemes: list[Lexeme] = []
    seen_ranks: dict[int, str] = {}
    for i, entry in enumerate(raw.get("lexemes") or ()):
        lemma = str(entry.get("lemma", ""))
        if not lemma:
            raise SchemaViolation(f"{where}: lexeme {i} without lemma")
        pos = str(entry.get("pos", ""))
        try:
            schema.check_pos(pos, where=f"{where}: lexeme '{lemma}'")
        except InvalidFeatures as exc:
            raise DanglingReference(str(exc)) from exc
        paradigm = str(entry.get("paradigm", ""))
        if paradigm not in paradigms:
            raise DanglingReference(f"{where}: lexeme '{lemma}': unknown paradigm '{paradigm}'")
        if paradigms[paradigm].pos != pos:
            raise SchemaViolation(
                f"{where}: lexeme '{lemma}': pos {pos} does not match paradigm "
                f"'{paradigm}' ({paradigms[paradigm].pos})"
            )
        stems = tuple(str(s) for s in (entry.get("stems") or ()))
        if not stems or any(not s for s in stems):
            raise SchemaViolation(f"{where}: lexeme '{lemma}': stems must be non-empty")
        max_stem = max(slot.stem for slot in paradigms[paradigm].slots)
        if max_stem >= len(stems):
            raise SchemaViolation(
                f"{where}: lexeme '{lemma}': paradigm '{paradigm}' needs "
                f"{max_stem + 1} stems, got {len(stems)}"
            )
        rank = entry.get("rank")
        if not isinstance(rank, int) or rank < 1:
            raise SchemaViolation(f"{where}: lexeme '{lemma}': rank must be a positive integer")
        if rank in seen_ranks:
            raise SchemaViolation(
                f"{where}: lexeme '{lemma}': rank {rank} already used by '{seen_ranks[rank]}'"
            )
        seen_ranks[rank] = lemma
        links = {str(k): str(v) for k, v in (entry.get("links") or {}).items()}
        lexemes.append(Lexeme(
            id=str(entry.get("id") or f"{lemma}#{pos}#{i}"),
            lemma=lemma,
            pos=pos,
            paradigm=paradigm,
            stems=stems,
            rank=rank,
            gloss=str(entry.get("gloss", "")),
            links=links,
        ))
    if not lexemes:
        raise SchemaViolation(f"{where}: empty lexicon")
    lemmas = {lex.lemma for lex in lexemes}
    for lex in lexemes:
        for rel, target in lex.links.items():
            if target not in lemmas:
                raise DanglingReference(
                    f"{where}: lexeme '{lex.lemma}': link {rel} -> unknown lemma '{target}'"
                )
    classes: dict[str, LemmaClass] = {}
    for entry in raw.get("classes") or ():
        cid = str(entry.get("id", ""))
        if not cid:
            raise SchemaViolation(f"{where}: lemma class without id")
        if cid in classes:
            raise SchemaViolation(f"{where}: duplicate lemma class '{cid}'")
        members = tuple(str(m) for m in (entry.get("members") or ()))
        for member in members:
            if member not in lemmas:
                raise DanglingReference(
                    f"{where}: class '{cid}': member '{member}' not in lexicon"
                )
        pattern = entry.get("pattern")
        compiled = None
        if pattern is not None:
            try:
                compiled = re.compile(str(pattern))
            except re.error as exc:
                raise SchemaViolation(f"{where}: class '{cid}': bad pattern: {exc}") from exc
        if not members and compiled is None:
            raise SchemaViolation(f"{where}: class '{cid}': needs members or pattern")
        classes[cid] = LemmaClass(
            id=cid, pos=entry.get("pos"), members=members, pattern=compiled,
        )
    return lexemes, classes


def _load_matcher(raw: dict, schema: FeatureSchema, classes: dict[str, LemmaClass],
                  where: str) -> Matcher:
    features = []
    for cat, value in (raw.get("features") or {}).items():
        values = value if isinstance(value, list) else [value]
        values = tuple(str(v) for v in values)
        for v in values:
            try:
                schema.check_value(str(cat), v, where=where)
            except InvalidFeatures as exc:
                raise DanglingReference(str(exc)) from exc
        features.append((str(cat), values))
    pos = raw.get("pos")
    if pos is not None:
        try:
            schema.check_pos(str(pos), where=where)
        except InvalidFeatures as exc:
            raise DanglingReference(str(exc)) from exc
    lemma_class = raw.get("lemma_class")
    if lemma_class is not None and lemma_class not in classes:
        raise DanglingReference(f"{where}: unknown lemma class '{lemma_class}'")
    chunk = raw.get("chunk")
    if chunk is not None and chunk not in ("NounPhrase", "PrepPhrase", "AnalyticVerb"):
        raise SchemaViolation(f"{where}: unknown chunk kind '{chunk}'")
    surface_re = None
    if raw.get("surface_re") is not None:
        try:
            surface_re = re.compile(str(raw["surface_re"]))
        except re.error as exc:
            raise SchemaViolation(f"{where}: bad surface_re: {exc}") from exc
    return Matcher(
        lemma=raw.get("lemma"),
        lemma_class=lemma_class,
        pos=pos,
        features=tuple(sorted(features)),
        surface=raw.get("surface"),
        surface_re=surface_re,
        chunk=chunk,
        anywhere=bool(raw.get("anywhere", False)),
        head=bool(raw.get("head", False)),
    )


def _load_recipes(raw: dict, schema: FeatureSchema, where: str) -> dict[str, DistractorRecipe]:
    recipes: dict[str, DistractorRecipe] = {}
    for entry in raw.get("recipes") or ():
        rid = str(entry.get("id", ""))
        if not rid:
            raise SchemaViolation(f"{where}: recipe without id")
        if rid in recipes:
            raise SchemaViolation(f"{where}: duplicate recipe '{rid}'")
        strategy = str(entry.get("strategy", ""))
        if strategy not in RECIPE_STRATEGIES:
            raise SchemaViolation(f"{where}: recipe '{rid}': unknown strategy '{strategy}'")
        category = entry.get("category")
        values = tuple(str(v) for v in (entry.get("values") or ()))
        if strategy == "FeatureVariation":
            if not category or not values:
                raise SchemaViolation(
                    f"{where}: recipe '{rid}': FeatureVariation needs category and values"
                )
            for v in values:
                try:
                    schema.check_value(str(category), v, where=f"{where}: recipe '{rid}'")
                except InvalidFeatures as exc:
                    raise DanglingReference(str(exc)) from exc
        variants = []
        for chain in entry.get("variants") or ():
            steps = tuple((str(old), str(new)) for old, new in chain)
            variants.append(steps)
        if strategy == "OrthographyVariants" and not variants:
            raise SchemaViolation(f"{where}: recipe '{rid}': OrthographyVariants needs variants")
        count = int(entry.get("count", 4))
        if not 2 <= count <= 5:
            raise SchemaViolation(f"{where}: recipe '{rid}': count must be 2..5")
        recipes[rid] = DistractorRecipe(
            id=rid,
            strategy=strategy,
            category=str(category) if category else None,
            values=values,
            ignore=tuple(str(c) for c in (entry.get("ignore") or ())),
            variants=tuple(variants),
            count=count,
        )
    return recipes


def _load_constructs(raw: dict, schema: FeatureSchema, classes: dict[str, LemmaClass],
                     recipes: dict[str, DistractorRecipe],
                     government: list[GovernmentPattern],
                     where: str) -> tuple[dict[str, ConstructDef], list[AnalyticPattern]]:
    gov_ids = {p.id for p in government}
    constructs: dict[str, ConstructDef] = {}
    for entry in raw.get("constructs") or ():
        cid = str(entry.get("id", ""))
        if not cid:
            raise SchemaViolation(f"{where}: construct without id")
        if cid in constructs:
            raise SchemaViolation(f"{where}: duplicate construct '{cid}'")
        here = f"{where}: construct '{cid}'"
        kind = str(entry.get("kind", ""))
        if kind not in CONSTRUCT_KINDS:
            raise SchemaViolation(f"{here}: unknown kind '{kind}'")
        cefr = str(entry.get("cefr", ""))
        if cefr not in CEFR_LEVELS:
            raise SchemaViolation(f"{here}: cefr must be one of {CEFR_LEVELS}")
        pattern = tuple(
            _load_matcher(m, schema, classes, f"{here}: matcher {i}")
            for i, m in enumerate(entry.get("pattern") or ())
        )
        government_ref = entry.get("government")
        if kind == "Government":
            if not government_ref or government_ref not in gov_ids:
                raise DanglingReference(
                    f"{here}: government pattern '{government_ref}' not defined"
                )
        elif not pattern:
            raise SchemaViolation(f"{here}: needs a matcher pattern")
        n_positions = 2 if kind == "Government" else len(pattern)
        candidates = tuple(int(c) for c in (entry.get("candidates") or ()))
        for c in candidates:
            if not 0 <= c < n_positions:
                raise SchemaViolation(f"{here}: candidate index {c} out of range")
        mode = str(entry.get("candidate_mode", "token"))
        if mode not in CANDIDATE_MODES:
            raise SchemaViolation(f"{here}: unknown candidate_mode '{mode}'")
        head = entry.get("head")
        if head is not None and not 0 <= int(head) < n_positions:
            raise SchemaViolation(f"{here}: head index out of range")
        paraphrase = []
        for j, el in enumerate(entry.get("paraphrase") or ()):
            if "text" in el:
                paraphrase.append(ParaphraseElement(text=str(el["text"])))
                continue
            slot = el.get("slot")
            if slot is None or not 0 <= int(slot) < n_positions:
                raise SchemaViolation(f"{here}: paraphrase element {j}: bad slot")
            bundle = _bundle(el.get("features"), schema, f"{here}: paraphrase element {j}")
            paraphrase.append(ParaphraseElement(slot=int(slot), features=bundle))
        recipe = entry.get("recipe")
        if recipe is not None and recipe not in recipes:
            raise DanglingReference(f"{here}: unknown recipe '{recipe}'")
        hints = entry.get("hints") or {}
        constructs[cid] = ConstructDef(
            id=cid,
            kind=kind,
            name=str(entry.get("name", cid)),
            cefr=cefr,
            pattern=pattern,
            government=government_ref,
            candidates=candidates,
            candidate_mode=mode,
            head=int(head) if head is not None else None,
            context_hint=hints.get("context"),
            paraphrase=tuple(paraphrase),
            recipe=recipe,
        )
    analytic = []
    for entry in raw.get("analytic") or ():
        aid = str(entry.get("id", ""))
        steps = tuple(
            _load_matcher(m, schema, classes, f"{where}: analytic '{aid}' step {i}")
            for i, m in enumerate(entry.get("steps") or ())
        )
        if len(steps) < 2:
            raise SchemaViolation(f"{where}: analytic '{aid}': needs at least two steps")
        if sum(1 for s in steps if s.head) != 1:
            raise SchemaViolation(f"{where}: analytic '{aid}': exactly one step must be head")
        analytic.append(AnalyticPattern(id=aid, steps=steps, gap=bool(entry.get("gap", False))))
    return constructs, analytic


def _load_government(raw: dict, schema: FeatureSchema, classes: dict[str, LemmaClass],
                     lemmas: set[str], where: str) -> list[GovernmentPattern]:
    patterns: list[GovernmentPattern] = []
    seen = set()
    for i, entry in enumerate(raw.get("patterns") or ()):
        pid = str(entry.get("id") or f"gov-{i}")
        if pid in seen:
            raise SchemaViolation(f"{where}: duplicate government pattern id '{pid}'")
        seen.add(pid)
        governor = entry.get("governor")
        governor_class = entry.get("governor_class")
        if bool(governor) == bool(governor_class):
            raise SchemaViolation(
                f"{where}: pattern '{pid}': exactly one of governor/governor_class"
            )
        if governor is not None and governor not in lemmas:
            raise DanglingReference(f"{where}: pattern '{pid}': unknown governor '{governor}'")
        if governor_class is not None and governor_class not in classes:
            raise DanglingReference(
                f"{where}: pattern '{pid}': unknown class '{governor_class}'"
            )
        case = entry.get("case")
        marker = entry.get("marker")
        if bool(case) == bool(marker):
            raise SchemaViolation(f"{where}: pattern '{pid}': exactly one of case/marker")
        if case is not None:
            try:
                schema.check_value("Case", str(case), where=f"{where}: pattern '{pid}'")
            except InvalidFeatures as exc:
                raise DanglingReference(str(exc)) from exc
        prep = entry.get("prep")
        if prep is not None and prep not in lemmas:
            raise DanglingReference(f"{where}: pattern '{pid}': unknown prep '{prep}'")
        if marker is not None and marker not in lemmas:
            raise DanglingReference(f"{where}: pattern '{pid}': unknown marker '{marker}'")
        direction = str(entry.get("direction", "free"))
        if direction not in ("free", "after"):
            raise SchemaViolation(f"{where}: pattern '{pid}': direction must be free/after")
        patterns.append(GovernmentPattern(
            id=pid,
            governor=governor,
            governor_class=governor_class,
            pos=entry.get("pos"),
            case=case,
            prep=prep,
            marker=marker,
            direction=direction,
        ))
    return patterns


def _load_hierarchy(raw: dict, schema: FeatureSchema, where: str) -> dict[str, tuple[str, ...]]:
    hierarchy: dict[str, tuple[str, ...]] = {}
    for pos, cats in (raw.get("hierarchy") or {}).items():
        try:
            schema.check_pos(str(pos), where=where)
        except InvalidFeatures as exc:
            raise DanglingReference(str(exc)) from exc
        cats = [str(c) for c in (cats or ())]
        if len(set(cats)) != len(cats):
            raise SchemaViolation(f"{where}: hierarchy for '{pos}' repeats a category")
        for cat in cats:
            if cat not in schema.categories:
                raise DanglingReference(f"{where}: hierarchy for '{pos}': unknown category '{cat}'")
        hierarchy[str(pos)] = tuple(cats)
    return hierarchy


def load_pack(path: str | Path) -> LanguagePack:
    """Load and validate one language pack directory."""
    root = Path(path)
    if not root.is_dir():
        raise MissingFile(f"pack directory not found: {root}")
    manifest = _read_yaml(root / "manifest.yaml")
    language = str(manifest.get("language", ""))
    if not language:
        raise SchemaViolation("manifest.yaml: missing 'language'")
    files = manifest.get("files") or {}
    for key in PACK_FILES:
        if key not in files:
            raise MissingFile(f"manifest.yaml: no '{key}' file listed")
    docs = {key: _read_yaml(root / str(files[key])) for key in PACK_FILES}

    schema = schema_from_dict(docs["schema"], str(files["schema"]))
    paradigms = _load_paradigms(docs["paradigms"], schema, str(files["paradigms"]))
    lexemes, classes = _load_lexicon(docs["lexicon"], schema, paradigms, str(files["lexicon"]))
    morphology = Morphology(schema, paradigms, lexemes)
    lemmas = {lex.lemma for lex in lexemes}
    government = _load_government(docs["government"], schema, classes, lemmas,
                                  str(files["government"]))
    recipes = _load_recipes(docs["constructs"], schema, str(files["constructs"]))
    constructs, analytic = _load_constructs(
        docs["constructs"], schema, classes, recipes, government, str(files["constructs"]),
    )
    hierarchy = _load_hierarchy(docs["hierarchy"], schema, str(files["hierarchy"]))
    abbreviations = tuple(str(a) for a in (manifest.get("abbreviations") or ()))
    return LanguagePack(
        language=language,
        name=str(manifest.get("name", language)),
        path=root,
        schema=schema,
        morphology=morphology,
        classes=classes,
        government=government,
        constructs=constructs,
        recipes=recipes,
        analytic=analytic,
        hierarchy=hierarchy,
        abbreviations=abbreviations,
    )


def load_packs(directory: str | Path) -> dict[str, LanguagePack]:
    """Load every pack under a directory, keyed by language code."""
    root = Path(directory)
    if not root.is_dir():
        raise MissingFile(f"pack directory not found: {root}")
    packs: dict[str, LanguagePack] = {}
    for child in sorted(root.iterdir()):
        if child.is_dir() and (child / "manifest.yaml").is_file():
            pack = load_pack(child)
            packs[pack.language] = pack
    return packs
