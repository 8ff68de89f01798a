"""Domain layer behind the HTTP API.

Owns users, stories, groups, sessions and placement runs; persists
domain documents as JSON snapshots and every attempt as one event-log
line, so progress views can always be rebuilt by replay. All privacy
rules live here: callers get Forbidden, never filtered silence, when
they cross a visibility boundary.
"""

from __future__ import annotations

import json
import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..detect import ConstructInstance, detect_constructs
from ..errors import (EmptyInput, ExhaustedAttempts, Forbidden, NoCandidates,
                      NotFound, RecipeFailed, UnknownExercise, UnsupportedLanguage)
from ..exercises import (Exercise, ExerciseCandidate, answer_matches, build_cloze,
                         build_mc, generate_candidates)
from ..feedback import build_hint_sequence, diagnose_answer, next_hint
from ..learner import (MAX_ATTEMPTS, MAX_HINTS, AttemptEvent, AttemptLedger,
                       CEFR_DIFFICULTY, SamplerConfig, SkillState, cefr_difficulty,
                       estimate, p_correct, placement_estimate, placement_next,
                       sample_exercise)
from ..pack import LanguagePack
from ..pipeline import AnnotatedStory, annotate
from ..store import DocumentStore, EventLog


@dataclass
class User:
    id: str
    name: str
    role: str
    token: str
    level: str | None = None

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "role": self.role,
                "token": self.token, "level": self.level}


@dataclass
class StoryRecord:
    id: str
    owner: str
    title: str
    language: str
    text: str
    visibility: str = "private"

    def to_dict(self) -> dict:
        return {"id": self.id, "owner": self.owner, "title": self.title,
                "language": self.language, "text": self.text,
                "visibility": self.visibility}

    def meta(self) -> dict:
        out = self.to_dict()
        del out["text"]
        return out


@dataclass
class GroupRecord:
    id: str
    name: str
    teacher: str
    invited: set[str] = field(default_factory=set)
    members: set[str] = field(default_factory=set)
    stories: set[str] = field(default_factory=set)

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "teacher": self.teacher,
                "invited": sorted(self.invited), "members": sorted(self.members),
                "stories": sorted(self.stories)}


@dataclass
class ExerciseRun:
    wrong: int = 0
    hints_consumed: int = 0
    pointer: int = 0
    ordinal: int = 0
    finished: bool = False
    correct: bool | None = None

    @property
    def hearts(self) -> int:
        return max(0, MAX_HINTS - self.hints_consumed)

    def to_dict(self) -> dict:
        return {"wrong": self.wrong, "hints_consumed": self.hints_consumed,
                "pointer": self.pointer, "ordinal": self.ordinal,
                "finished": self.finished, "correct": self.correct}


@dataclass
class SessionRecord:
    id: str
    learner: str
    story: str
    seed: int
    density: int
    plan: list[dict]
    exercises: dict[str, Exercise]
    runs: dict[str, ExerciseRun]
    order: list[str]

    def to_dict(self) -> dict:
        return {"id": self.id, "learner": self.learner, "story": self.story,
                "seed": self.seed, "density": self.density, "plan": self.plan,
                "runs": {k: r.to_dict() for k, r in self.runs.items()},
                "order": self.order}


@dataclass
class PlacementRecord:
    id: str
    learner: str
    language: str
    responses: list[tuple[str, bool]] = field(default_factory=list)
    current: str | None = None
    finished: bool = False

    def to_dict(self) -> dict:
        return {"id": self.id, "learner": self.learner, "language": self.language,
                "responses": [list(r) for r in self.responses],
                "current": self.current, "finished": self.finished}


def _new_id(prefix: str) -> str:
    return f"{prefix}-{uuid.uuid4().hex[:10]}"


class TutorService:
    """All tutoring operations behind the API, privacy rules included."""

    def __init__(self, packs: dict[str, LanguagePack], data_dir: str | Path):
        self.packs = packs
        data_dir = Path(data_dir)
        self.events = EventLog(data_dir / "events.ndjson")
        self.docs = DocumentStore(data_dir / "docs")
        self.users: dict[str, User] = {}
        self.tokens: dict[str, str] = {}
        self.stories: dict[str, StoryRecord] = {}
        self.groups: dict[str, GroupRecord] = {}
        self.sessions: dict[str, SessionRecord] = {}
        self.placements: dict[str, PlacementRecord] = {}
        self._annotated: dict[str, tuple[AnnotatedStory, list[ConstructInstance],
                                         list[ExerciseCandidate]]] = {}
        self._banks: dict[str, dict] = {}
        self._observations: list = []
        self._ledger = AttemptLedger()
        self._state: SkillState | None = None
        self._state_dirty = True
        self._lock = threading.RLock()
        self._cefr = {cid: c.cefr for pack in packs.values()
                      for cid, c in pack.constructs.items()}
        self._load()

    # --- persistence ------------------------------------------------------

    def _load(self) -> None:
        users = self.docs.load("users", {}) or {}
        for raw in users.values():
            user = User(**raw)
            self.users[user.id] = user
            self.tokens[user.token] = user.id
        groups = self.docs.load("groups", {}) or {}
        for raw in groups.values():
            self.groups[raw["id"]] = GroupRecord(
                id=raw["id"], name=raw["name"], teacher=raw["teacher"],
                invited=set(raw["invited"]), members=set(raw["members"]),
                stories=set(raw["stories"]))
        for name in self.docs.names("story-"):
            raw = self.docs.load(name)
            self.stories[raw["id"]] = StoryRecord(**raw)
        for name in self.docs.names("session-"):
            raw = self.docs.load(name)
            self._restore_session(raw)
        for raw in self.events.read_all():
            event = AttemptEvent.from_dict(raw)
            self._observations.extend(self._ledger.record(event))
        self._state_dirty = True

    def _save_users(self) -> None:
        self.docs.save("users", {u.id: u.to_dict() for u in self.users.values()})

    def _save_groups(self) -> None:
        self.docs.save("groups", {g.id: g.to_dict() for g in self.groups.values()})

    def _save_story(self, story: StoryRecord) -> None:
        self.docs.save(story.id, story.to_dict())

    def _save_session(self, session: SessionRecord) -> None:
        self.docs.save(session.id, session.to_dict())

    # --- helpers ------------------------------------------------------------

    def _user(self, token: str) -> User:
        uid = self.tokens.get(token)
        if uid is None:
            raise Forbidden("unknown token")
        return self.users[uid]

    def _story(self, story_id: str) -> StoryRecord:
        story = self.stories.get(story_id)
        if story is None:
            raise NotFound(f"no story '{story_id}'")
        return story

    def _pack(self, language: str) -> LanguagePack:
        pack = self.packs.get(language)
        if pack is None:
            raise UnsupportedLanguage(f"no language pack for '{language}'")
        return pack

    def _can_read(self, user: User, story: StoryRecord) -> bool:
        if story.owner == user.id or story.visibility == "public":
            return True
        if story.visibility.startswith("group:"):
            group = self.groups.get(story.visibility.split(":", 1)[1])
            if group and (user.id in group.members or user.id == group.teacher):
                return True
        return False

    def _require_read(self, user: User, story: StoryRecord) -> None:
        if not self._can_read(user, story):
            raise Forbidden(f"story '{story.id}' is not visible to you")

    def _annotation(self, story: StoryRecord):
        cached = self._annotated.get(story.id)
        if cached is None:
            pack = self._pack(story.language)
            annotated = annotate(pack, story.text, story.id)
            instances = detect_constructs(annotated, pack)
            candidates = generate_candidates(annotated, instances, pack)
            cached = (annotated, instances, candidates)
            self._annotated[story.id] = cached
        return cached

    def _current_state(self) -> SkillState:
        if self._state_dirty:
            self._state = estimate(self._observations) if self._observations else SkillState()
            self._state_dirty = False
        return self._state

    def _record(self, event: AttemptEvent) -> None:
        observations = self._ledger.record(event)
        self.events.append(event.to_dict())
        if observations:
            self._observations.extend(observations)
            self._state_dirty = True

    # --- accounts -----------------------------------------------------------

    def register(self, name: str, role: str) -> User:
        if role not in ("learner", "teacher"):
            raise EmptyInput(f"role must be learner or teacher, not '{role}'")
        if not name.strip():
            raise EmptyInput("name must be non-empty")
        user = User(_new_id("u"), name.strip(), role, uuid.uuid4().hex)
        with self._lock:
            self.users[user.id] = user
            self.tokens[user.token] = user.id
            self._save_users()
        return user

    def set_level(self, user: User, level: str) -> User:
        cefr_difficulty(level)
        with self._lock:
            user.level = level
            self._save_users()
        return user

    def languages(self) -> list[dict]:
        return [{"language": code, "name": pack.name,
                 "constructs": len(pack.constructs)}
                for code, pack in sorted(self.packs.items())]

    # --- stories --------------------------------------------------------------

    def upload_story(self, user: User, language: str, title: str, text: str) -> dict:
        pack = self._pack(language)
        if not text or not text.strip():
            raise EmptyInput("story text must be non-empty")
        story = StoryRecord(_new_id("story"), user.id, title, language, text)
        with self._lock:
            self.stories[story.id] = story
            self._annotated.pop(story.id, None)
            self._annotation(story)
            self._save_story(story)
        return story.meta()

    def list_stories(self, user: User) -> list[dict]:
        return [s.meta() for s in sorted(self.stories.values(), key=lambda s: s.id)
                if self._can_read(user, s)]

    def story_meta(self, user: User, story_id: str) -> dict:
        story = self._story(story_id)
        self._require_read(user, story)
        return story.meta()

    def share_story(self, user: User, story_id: str, group_id: str | None = None,
                    public: bool = False) -> dict:
        story = self._story(story_id)
        if story.owner != user.id:
            raise Forbidden("only the owner may share a story")
        with self._lock:
            if public:
                story.visibility = "public"
            elif group_id is not None:
                group = self.groups.get(group_id)
                if group is None:
                    raise NotFound(f"no group '{group_id}'")
                if group.teacher != user.id:
                    raise Forbidden("only the group's teacher may share into it")
                story.visibility = f"group:{group_id}"
                group.stories.add(story.id)
                self._save_groups()
            else:
                story.visibility = "private"
            self._save_story(story)
        return story.meta()

    def preview(self, user: User, story_id: str) -> dict:
        """Annotated view with nothing blanked: Fig-2-style preview."""
        story = self._story(story_id)
        self._require_read(user, story)
        pack = self._pack(story.language)
        annotated, instances, candidates = self._annotation(story)
        by_token: dict[int, list[str]] = {}
        candidate_spans = []
        for cand in candidates:
            candidate_spans.append({"span": list(cand.span), "links": list(cand.links),
                                    "answer": cand.answer, "hint_lemma": cand.hint_lemma})
            for t in range(cand.span[0], cand.span[1] + 1):
                by_token.setdefault(t, []).extend(cand.links)
        tokens = []
        for i, tok in enumerate(annotated.tokens):
            entry = tok.to_dict()
            entry["candidate"] = i in by_token
            entry["constructs"] = sorted(set(by_token.get(i, [])))
            tokens.append(entry)
        names = {cid: pack.constructs[cid].name for cid in pack.constructs}
        return {
            "story": story.meta(),
            "text": annotated.text,
            "sentences": [list(s) for s in annotated.sentences],
            "paragraphs": [list(p) for p in annotated.paragraphs],
            "tokens": tokens,
            "chunks": [c.to_dict() for c in annotated.chunks],
            "constructs": [dict(inst.to_dict(), name=names.get(inst.construct, inst.construct),
                                cefr=self._cefr.get(inst.construct))
                           for inst in instances],
            "candidates": candidate_spans,
        }

    def translation(self, user: User, story_id: str, token_index: int) -> dict:
        story = self._story(story_id)
        self._require_read(user, story)
        pack = self._pack(story.language)
        annotated, _, _ = self._annotation(story)
        if not 0 <= token_index < len(annotated.tokens):
            raise NotFound(f"no token {token_index}")
        token = annotated.tokens[token_index]
        gloss = ""
        if token.chosen is not None:
            for lexeme in pack.morphology.lexemes:
                if lexeme.lemma == token.chosen.lemma and lexeme.pos == token.chosen.pos:
                    gloss = lexeme.gloss or ""
                    break
        return {"token": token.surface, "gloss": gloss}

    # --- sessions ---------------------------------------------------------------

    def _theta_for(self, user: User, state: SkillState) -> float:
        if user.id in state.thetas:
            return state.thetas[user.id]
        if user.level:
            return cefr_difficulty(user.level)
        return 0.0

    def _candidate_p(self, user: User, cand: ExerciseCandidate, state: SkillState) -> float:
        patched = SkillState(thetas={user.id: self._theta_for(user, state)},
                             difficulties=state.difficulties)
        return p_correct(patched, user.id, cand.links, self._cefr)

    def _build_exercise(self, pack: LanguagePack, cand: ExerciseCandidate,
                        kind: str, construct_id: str | None, mc_seed: int) -> Exercise:
        if kind == "mc" and construct_id is not None:
            try:
                return build_mc(cand, pack.constructs[construct_id], pack, mc_seed)
            except RecipeFailed:
                pass
        return build_cloze(cand)

    def _plan_session(self, user: User, story: StoryRecord, density: int,
                      seed: int) -> list[dict]:
        pack = self._pack(story.language)
        annotated, _, candidates = self._annotation(story)
        if not candidates:
            raise NoCandidates(f"story '{story.id}' offers nothing to practice")
        state = self._current_state()
        rng = random.Random(seed)
        config = SamplerConfig(seed=seed)
        plan: list[dict] = []
        for p_start, p_end in annotated.paragraphs:
            pool = [c for c in candidates if p_start <= c.sentence < p_end]
            for _ in range(min(density, len(pool))):
                probs = [self._candidate_p(user, c, state) for c in pool]
                drawn = sample_exercise(pool, probs, config, rng)
                pool.remove(drawn)
                mc_options = [cid for cid in drawn.links if pack.constructs[cid].recipe]
                kind = "cloze"
                construct_id = None
                if mc_options and rng.random() < 0.5:
                    kind = "mc"
                    construct_id = rng.choice(mc_options)
                plan.append({"span": list(drawn.span), "kind": kind,
                             "construct": construct_id,
                             "mc_seed": rng.randrange(2 ** 31)})
        return plan

    def _materialize(self, story: StoryRecord, plan: list[dict]) -> tuple[dict, list[str]]:
        pack = self._pack(story.language)
        annotated, instances, candidates = self._annotation(story)
        by_span = {c.span: c for c in candidates}
        exercises: dict[str, Exercise] = {}
        order: list[str] = []
        for step in plan:
            cand = by_span[tuple(step["span"])]
            exercise = self._build_exercise(pack, cand, step["kind"],
                                            step.get("construct"), step.get("mc_seed", 0))
            exercise = exercise.with_hints(
                build_hint_sequence(cand, instances, annotated, pack))
            exercises[exercise.id] = exercise
            order.append(exercise.id)
        order.sort(key=lambda eid: exercises[eid].candidate.span)
        return exercises, order

    def start_session(self, user: User, story_id: str, density: int = 3,
                      seed: int = 0) -> dict:
        story = self._story(story_id)
        self._require_read(user, story)
        with self._lock:
            for old in list(self.sessions.values()):
                if old.learner == user.id and old.story == story_id:
                    self.sessions.pop(old.id)
                    self.docs.delete(old.id)
            plan = self._plan_session(user, story, density, seed)
            exercises, order = self._materialize(story, plan)
            session = SessionRecord(
                id=_new_id("session"), learner=user.id, story=story_id,
                seed=seed, density=density, plan=plan, exercises=exercises,
                runs={eid: ExerciseRun() for eid in exercises}, order=order)
            self.sessions[session.id] = session
            self._save_session(session)
        return self.session_view(user, session.id)

    def _restore_session(self, raw: dict) -> None:
        story = self.stories.get(raw["story"])
        if story is None:
            return
        exercises, order = self._materialize(story, raw["plan"])
        runs = {eid: ExerciseRun(**state) for eid, state in raw["runs"].items()}
        for eid in exercises:
            runs.setdefault(eid, ExerciseRun())
        self.sessions[raw["id"]] = SessionRecord(
            id=raw["id"], learner=raw["learner"], story=raw["story"],
            seed=raw["seed"], density=raw["density"], plan=raw["plan"],
            exercises=exercises, runs=runs, order=raw["order"])

    def _session(self, user: User, session_id: str) -> SessionRecord:
        session = self.sessions.get(session_id)
        if session is None:
            raise NotFound(f"no session '{session_id}'")
        if session.learner != user.id:
            raise Forbidden("not your session")
        return session

    def _exercise_payload(self, session: SessionRecord, exercise: Exercise,
                          run: ExerciseRun, story: StoryRecord) -> dict:
        annotated, _, _ = self._annotation(story)
        cand = exercise.candidate
        sent_first = annotated.sentences[cand.sentence][0]
        sent_base = annotated.tokens[sent_first].start
        span_start = annotated.tokens[cand.span[0]].start - sent_base
        span_end = annotated.tokens[cand.span[1]].end - sent_base
        payload = {
            "id": exercise.id,
            "kind": exercise.kind,
            "sentence": annotated.sentence_text(cand.sentence),
            "sentence_index": cand.sentence,
            "blank": {"start": span_start, "end": span_end},
            "hint_lemma": cand.hint_lemma,
            "links": list(cand.links),
            "hearts": run.hearts,
            "attempts_left": 0 if run.finished else MAX_ATTEMPTS - run.wrong,
            "finished": run.finished,
            "correct": run.correct,
        }
        if exercise.kind == "mc":
            payload["options"] = list(exercise.options)
            payload["construct"] = exercise.construct
        if run.finished:
            payload["answer"] = cand.answer
        return payload

    def session_view(self, user: User, session_id: str) -> dict:
        session = self._session(user, session_id)
        story = self._story(session.story)
        return {
            "id": session.id,
            "story": story.meta(),
            "seed": session.seed,
            "density": session.density,
            "exercises": [self._exercise_payload(session, session.exercises[eid],
                                                 session.runs[eid], story)
                          for eid in session.order],
        }

    def submit_answer(self, user: User, session_id: str, exercise_id: str,
                      given: str) -> dict:
        session = self._session(user, session_id)
        exercise = session.exercises.get(exercise_id)
        if exercise is None:
            raise UnknownExercise(f"no exercise '{exercise_id}' in this session")
        run = session.runs[exercise_id]
        if run.finished:
            raise ExhaustedAttempts("this exercise is already finished")
        story = self._story(session.story)
        pack = self._pack(story.language)
        with self._lock:
            correct = answer_matches(exercise.candidate, given)
            run.ordinal += 1
            result: dict = {"correct": correct}
            if correct:
                run.finished = True
                run.correct = True
            else:
                run.wrong += 1
                run.hints_consumed = min(MAX_HINTS, run.hints_consumed + 1)
                diff = diagnose_answer(exercise.candidate, given, pack)
                result["diff"] = diff.to_dict(pack)
                hint = next_hint(exercise.hints, run.pointer, diff)
                if hint is not None:
                    run.pointer = hint.level + 1
                    result["hint"] = hint.to_dict()
                if run.wrong >= MAX_ATTEMPTS:
                    run.finished = True
                    run.correct = False
                    result["exhausted"] = True
                    result["answer"] = exercise.candidate.answer
            self._record(AttemptEvent(
                learner=user.id, exercise=exercise_id,
                constructs=exercise.candidate.links, ordinal=run.ordinal,
                kind="answer", given=given, correct=correct,
                hints_used=run.hints_consumed, timestamp=time.time()))
            self._save_session(session)
        result["hearts"] = run.hearts
        result["finished"] = run.finished
        if correct:
            result["answer"] = exercise.candidate.answer
        return result

    def request_hint(self, user: User, session_id: str, exercise_id: str) -> dict:
        session = self._session(user, session_id)
        exercise = session.exercises.get(exercise_id)
        if exercise is None:
            raise UnknownExercise(f"no exercise '{exercise_id}' in this session")
        run = session.runs[exercise_id]
        if run.finished:
            raise ExhaustedAttempts("this exercise is already finished")
        with self._lock:
            hint = next_hint(exercise.hints, run.pointer, None)
            if hint is not None:
                run.pointer = hint.level + 1
                run.hints_consumed = min(MAX_HINTS, run.hints_consumed + 1)
                run.ordinal += 1
                self._record(AttemptEvent(
                    learner=user.id, exercise=exercise_id,
                    constructs=exercise.candidate.links, ordinal=run.ordinal,
                    kind="hint", given=None, correct=None,
                    hints_used=run.hints_consumed, timestamp=time.time()))
                self._save_session(session)
        return {"hint": hint.to_dict() if hint else None, "hearts": run.hearts}

    # --- placement -----------------------------------------------------------

    def _bank(self, language: str) -> dict:
        bank = self._banks.get(language)
        if bank is None:
            pack = self._pack(language)
            gold = json.load(open(Path(pack.path) / "gold.json", encoding="utf-8"))
            items: dict[str, dict] = {}
            for si, entry in enumerate(gold["stories"]):
                annotated = annotate(pack, entry["text"], f"bank-{language}-{si}")
                instances = detect_constructs(annotated, pack)
                for cand in generate_candidates(annotated, instances, pack):
                    exercise = build_cloze(cand)
                    difficulty = max(cefr_difficulty(self._cefr[cid]) for cid in cand.links)
                    sent_first = annotated.sentences[cand.sentence][0]
                    base = annotated.tokens[sent_first].start
                    items[exercise.id] = {
                        "id": exercise.id,
                        "candidate": cand,
                        "difficulty": difficulty,
                        "sentence": annotated.sentence_text(cand.sentence),
                        "blank": {"start": annotated.tokens[cand.span[0]].start - base,
                                  "end": annotated.tokens[cand.span[1]].end - base},
                    }
            bank = items
            self._banks[language] = bank
        return bank

    def _placement_item_payload(self, item: dict) -> dict:
        return {"id": item["id"], "sentence": item["sentence"],
                "blank": item["blank"], "hint_lemma": item["candidate"].hint_lemma}

    def placement_start(self, user: User, language: str) -> dict:
        bank = self._bank(language)
        difficulties = {iid: item["difficulty"] for iid, item in bank.items()}
        record = PlacementRecord(_new_id("placement"), user.id, language)
        record.current = placement_next(difficulties, record.responses)
        with self._lock:
            self.placements[record.id] = record
        return {"id": record.id, "finished": False,
                "item": self._placement_item_payload(bank[record.current])}

    def placement_answer(self, user: User, placement_id: str, given: str) -> dict:
        record = self.placements.get(placement_id)
        if record is None:
            raise NotFound(f"no placement run '{placement_id}'")
        if record.learner != user.id:
            raise Forbidden("not your placement run")
        if record.finished or record.current is None:
            raise ExhaustedAttempts("this placement run is finished")
        bank = self._bank(record.language)
        difficulties = {iid: item["difficulty"] for iid, item in bank.items()}
        item = bank[record.current]
        with self._lock:
            correct = answer_matches(item["candidate"], given)
            record.responses.append((record.current, correct))
            record.current = placement_next(difficulties, record.responses)
            result = {"id": record.id, "correct": correct,
                      "answered": len(record.responses)}
            if record.current is None:
                record.finished = True
                theta, se = placement_estimate(difficulties, record.responses)
                level = min(CEFR_DIFFICULTY, key=lambda lv: abs(CEFR_DIFFICULTY[lv] - theta))
                self.users[user.id].level = level
                self._save_users()
                result.update({"finished": True, "theta": round(theta, 4),
                               "se": round(se, 4), "level": level})
            else:
                result.update({"finished": False,
                               "item": self._placement_item_payload(bank[record.current])})
        return result

    # --- progress and groups ----------------------------------------------------

    def _progress_for(self, learner_id: str) -> dict:
        from ..learner import progress_report
        state = self._current_state()
        mine = [o for o in self._observations if o.learner == learner_id]
        if not mine:
            return {"learner": learner_id, "theta": state.thetas.get(learner_id, 0.0),
                    "constructs": {}}
        return progress_report(learner_id, self._observations, state, self._cefr)

    def progress(self, user: User) -> dict:
        return self._progress_for(user.id)

    def learner_progress(self, user: User, learner_id: str) -> dict:
        if user.id == learner_id:
            return self._progress_for(learner_id)
        if user.role != "teacher":
            raise Forbidden("only teachers may read another learner's progress")
        allowed = any(learner_id in g.members for g in self.groups.values()
                      if g.teacher == user.id)
        if not allowed:
            raise Forbidden("learner is not an accepted member of your groups")
        return self._progress_for(learner_id)

    def create_group(self, user: User, name: str) -> dict:
        if user.role != "teacher":
            raise Forbidden("only teachers may create groups")
        group = GroupRecord(_new_id("group"), name, user.id)
        with self._lock:
            self.groups[group.id] = group
            self._save_groups()
        return group.to_dict()

    def _group(self, group_id: str) -> GroupRecord:
        group = self.groups.get(group_id)
        if group is None:
            raise NotFound(f"no group '{group_id}'")
        return group

    def invite(self, user: User, group_id: str, learner_id: str) -> dict:
        group = self._group(group_id)
        if group.teacher != user.id:
            raise Forbidden("only the group's teacher may invite")
        if learner_id not in self.users:
            raise NotFound(f"no user '{learner_id}'")
        with self._lock:
            group.invited.add(learner_id)
            self._save_groups()
        return group.to_dict()

    def accept(self, user: User, group_id: str) -> dict:
        group = self._group(group_id)
        if user.id not in group.invited:
            raise Forbidden("you have not been invited to this group")
        with self._lock:
            group.invited.discard(user.id)
            group.members.add(user.id)
            self._save_groups()
        return group.to_dict()

    def group_info(self, user: User, group_id: str) -> dict:
        group = self._group(group_id)
        if user.id != group.teacher and user.id not in group.members:
            raise Forbidden("you are not part of this group")
        return group.to_dict()

    def group_progress(self, user: User, group_id: str) -> dict:
        group = self._group(group_id)
        if group.teacher != user.id:
            raise Forbidden("only the group's teacher may read group progress")
        return {"group": group.id,
                "members": {m: self._progress_for(m) for m in sorted(group.members)}}


