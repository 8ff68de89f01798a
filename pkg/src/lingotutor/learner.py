"""Learner skill model: attempt ledger, Rasch estimation, sampling.

Answers feed an append-only event ledger that turns final outcomes into
weighted observations per linked construct (hints cost weight, early
wrong answers add small penalties). A one-parameter logistic model with
standard normal priors on both ability and difficulty is fitted by
alternating Newton steps; difficulties are recentered to mean zero so
ability scores stay comparable across fits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateData, EmptyBank, EmptyPool, ExhaustedAttempts,
                     NoLevel, OutOfOrderAttempt, UnknownExercise, UnknownLearner)

MAX_ATTEMPTS = 5
MAX_HINTS = 5
PENALTY_WEIGHT = 0.5
HINT_COST = 0.2
MIN_WEIGHT = 0.2

CEFR_DIFFICULTY = {"A1": -2.5, "A2": -1.5, "B1": -0.5, "B2": 0.5, "C1": 1.5, "C2": 2.5}


def logistic(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


@dataclass(frozen=True)
class AttemptEvent:
    """One answer or hint request on one exercise."""

    learner: str
    exercise: str
    constructs: tuple[str, ...]
    ordinal: int
    kind: str
    given: str | None = None
    correct: bool | None = None
    hints_used: int = 0
    timestamp: float = 0.0

    def to_dict(self) -> dict:
        return {
            "learner": self.learner,
            "exercise": self.exercise,
            "constructs": list(self.constructs),
            "ordinal": self.ordinal,
            "kind": self.kind,
            "given": self.given,
            "correct": self.correct,
            "hints_used": self.hints_used,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AttemptEvent":
        return cls(
            learner=raw["learner"],
            exercise=raw["exercise"],
            constructs=tuple(raw["constructs"]),
            ordinal=int(raw["ordinal"]),
            kind=raw["kind"],
            given=raw.get("given"),
            correct=raw.get("correct"),
            hints_used=int(raw.get("hints_used", 0)),
            timestamp=float(raw.get("timestamp", 0.0)),
        )


@dataclass(frozen=True)
class ConstructObservation:
    learner: str
    construct: str
    outcome: bool
    weight: float


@dataclass
class _ExerciseTrack:
    answers: int = 0
    last_ordinal: int = 0
    finished: bool = False


class AttemptLedger:
    """Validates attempt ordering and derives weighted observations."""

    def __init__(self, known_exercises: set[str] | None = None):
        self.known = known_exercises
        self._tracks: dict[tuple[str, str], _ExerciseTrack] = {}

    def record(self, event: AttemptEvent) -> list[ConstructObservation]:
        if self.known is not None and event.exercise not in self.known:
            raise UnknownExercise(f"unknown exercise '{event.exercise}'")
        key = (event.learner, event.exercise)
        track = self._tracks.setdefault(key, _ExerciseTrack())
        if event.ordinal <= track.last_ordinal:
            raise OutOfOrderAttempt(
                f"ordinal {event.ordinal} after {track.last_ordinal} on '{event.exercise}'")
        if track.finished:
            raise ExhaustedAttempts(f"exercise '{event.exercise}' is already finished")
        if event.hints_used > MAX_HINTS:
            raise OutOfOrderAttempt(f"hints_used {event.hints_used} exceeds {MAX_HINTS}")
        track.last_ordinal = event.ordinal
        if event.kind != "answer":
            return []
        track.answers += 1
        final = bool(event.correct) or track.answers >= MAX_ATTEMPTS
        if not final:
            return [ConstructObservation(event.learner, c, False, PENALTY_WEIGHT)
                    for c in event.constructs]
        track.finished = True
        weight = max(MIN_WEIGHT, 1.0 - HINT_COST * event.hints_used)
        return [ConstructObservation(event.learner, c, bool(event.correct), weight)
                for c in event.constructs]


def replay_events(events: list[AttemptEvent],
                  known_exercises: set[str] | None = None) -> list[ConstructObservation]:
    """Rebuild the observation stream from a persisted event log."""
    ledger = AttemptLedger(known_exercises)
    out: list[ConstructObservation] = []
    for event in events:
        out.extend(ledger.record(event))
    return out


# --- estimation -------------------------------------------------------------


@dataclass
class SkillState:
    """Fitted abilities and difficulties with standard errors."""

    thetas: dict[str, float] = field(default_factory=dict)
    difficulties: dict[str, float] = field(default_factory=dict)
    se_theta: dict[str, float] = field(default_factory=dict)
    se_b: dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    loglik: float = 0.0

    def to_dict(self) -> dict:
        return {
            "thetas": dict(sorted(self.thetas.items())),
            "difficulties": dict(sorted(self.difficulties.items())),
            "se_theta": dict(sorted(self.se_theta.items())),
            "se_b": dict(sorted(self.se_b.items())),
            "iterations": self.iterations,
            "loglik": self.loglik,
        }


def estimate(observations: list[ConstructObservation],
             max_iter: int = 200, tol: float = 1e-4) -> SkillState:
    """Fit the logistic model by alternating penalized Newton steps.

    Both parameter families carry a standard normal prior, so the fit is
    defined even when a learner answers everything one way. Difficulties
    are shifted to mean zero afterwards, abilities by the same amount.
    """
    if not observations:
        raise DegenerateData("no observations to estimate from")
    learners = sorted({o.learner for o in observations})
    constructs = sorted({o.construct for o in observations})
    li = {name: i for i, name in enumerate(learners)}
    ci = {name: i for i, name in enumerate(constructs)}
    ol = np.array([li[o.learner] for o in observations])
    oc = np.array([ci[o.construct] for o in observations])
    y = np.array([1.0 if o.outcome else 0.0 for o in observations])
    w = np.array([o.weight for o in observations])
    theta = np.zeros(len(learners))
    b = np.zeros(len(constructs))
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p = 1.0 / (1.0 + np.exp(-(theta[ol] - b[oc])))
        resid = w * (y - p)
        curv = w * p * (1.0 - p)
        g_t = np.bincount(ol, weights=resid, minlength=len(learners)) - theta
        h_t = -np.bincount(ol, weights=curv, minlength=len(learners)) - 1.0
        d_theta = -g_t / h_t
        theta = theta + d_theta

        p = 1.0 / (1.0 + np.exp(-(theta[ol] - b[oc])))
        resid = w * (y - p)
        curv = w * p * (1.0 - p)
        g_b = -np.bincount(oc, weights=resid, minlength=len(constructs)) - b
        h_b = -np.bincount(oc, weights=curv, minlength=len(constructs)) - 1.0
        d_b = -g_b / h_b
        b = b + d_b

        if max(np.max(np.abs(d_theta)), np.max(np.abs(d_b))) < tol:
            break
    shift = float(np.mean(b))
    b = b - shift
    theta = theta - shift
    p = 1.0 / (1.0 + np.exp(-(theta[ol] - b[oc])))
    curv = w * p * (1.0 - p)
    loglik = float(np.sum(w * (y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))
    se_t = 1.0 / np.sqrt(np.bincount(ol, weights=curv, minlength=len(learners)) + 1.0)
    se_b = 1.0 / np.sqrt(np.bincount(oc, weights=curv, minlength=len(constructs)) + 1.0)
    return SkillState(
        thetas={name: float(theta[i]) for name, i in li.items()},
        difficulties={name: float(b[i]) for name, i in ci.items()},
        se_theta={name: float(se_t[i]) for name, i in li.items()},
        se_b={name: float(se_b[i]) for name, i in ci.items()},
        iterations=iterations,
        loglik=loglik,
    )


def cefr_difficulty(level: str) -> float:
    """Map a CEFR level to a prior difficulty."""
    try:
        return CEFR_DIFFICULTY[level]
    except KeyError:
        raise NoLevel(f"unknown CEFR level '{level}'") from None


def p_correct(state: SkillState, learner: str, construct_ids,
              cefr_levels: dict[str, str]) -> float:
    """Success probability against the hardest linked construct.

    Constructs absent from the fit fall back to their CEFR difficulty;
    an unseen learner sits at the prior mean.
    """
    theta = state.thetas.get(learner, 0.0)
    bs = []
    for cid in construct_ids:
        if cid in state.difficulties:
            bs.append(state.difficulties[cid])
        else:
            bs.append(cefr_difficulty(cefr_levels[cid]))
    if not bs:
        raise DegenerateData("exercise is linked to no constructs")
    return logistic(theta - max(bs))


# --- sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class SamplerConfig:
    target: float = 0.5
    sigma: float = 0.15
    seed: int = 0


def sample_exercise(pool: list, probabilities: list[float],
                    config: SamplerConfig, rng: random.Random | None = None):
    """Draw one item, weighted toward the target success probability."""
    if not pool:
        raise EmptyPool("no exercises to sample from")
    if rng is None:
        rng = random.Random(config.seed)
    weights = [math.exp(-((p - config.target) ** 2) / (2.0 * config.sigma ** 2))
               for p in probabilities]
    return rng.choices(pool, weights=weights, k=1)[0]


# --- placement --------------------------------------------------------------


PLACEMENT_MAX_ITEMS = 20
PLACEMENT_SE_STOP = 0.4


def placement_estimate(bank: dict[str, float],
                       responses: list[tuple[str, bool]]) -> tuple[float, float]:
    """Ability estimate and standard error from placement responses."""
    theta = 0.0
    if responses:
        bs = np.array([bank[item] for item, _ in responses])
        ys = np.array([1.0 if ok else 0.0 for _, ok in responses])
        for _ in range(100):
            p = 1.0 / (1.0 + np.exp(-(theta - bs)))
            g = float(np.sum(ys - p)) - theta
            h = -float(np.sum(p * (1.0 - p))) - 1.0
            step = -g / h
            theta += step
            if abs(step) < 1e-8:
                break
        p = 1.0 / (1.0 + np.exp(-(theta - bs)))
        se = 1.0 / math.sqrt(float(np.sum(p * (1.0 - p))) + 1.0)
    else:
        se = 1.0
    return theta, se


def placement_next(bank: dict[str, float],
                   responses: list[tuple[str, bool]]) -> str | None:
    """Pick the unanswered item closest to the running ability estimate.

    Returns None once the test is finished: enough items answered, the
    estimate is tight, or the bank is used up.
    """
    if not bank:
        raise EmptyBank("placement bank is empty")
    theta, se = placement_estimate(bank, responses)
    if len(responses) >= PLACEMENT_MAX_ITEMS or (responses and se < PLACEMENT_SE_STOP):
        return None
    answered = {item for item, _ in responses}
    remaining = [item for item in bank if item not in answered]
    if not remaining:
        return None
    return min(remaining, key=lambda item: (abs(bank[item] - theta), bank[item], item))


# --- reporting --------------------------------------------------------------


TREND_WINDOW = 20


def progress_report(learner: str, observations: list[ConstructObservation],
                    state: SkillState, cefr_levels: dict[str, str]) -> dict:
    """Per-construct mastery summary for one learner."""
    mine = [o for o in observations if o.learner == learner]
    if not mine:
        raise UnknownLearner(f"no observations for learner '{learner}'")
    by_construct: dict[str, list[ConstructObservation]] = {}
    for obs in mine:
        by_construct.setdefault(obs.construct, []).append(obs)

    def rate(obs: list[ConstructObservation]) -> float:
        total = sum(o.weight for o in obs)
        return sum(o.weight for o in obs if o.outcome) / total if total else 0.0

    constructs = {}
    for cid, obs in sorted(by_construct.items()):
        overall = rate(obs)
        recent = rate(obs[-TREND_WINDOW:])
        constructs[cid] = {
            "observations": len(obs),
            "successes": sum(1 for o in obs if o.outcome),
            "rate": round(overall, 4),
            "trend": round(recent - overall, 4),
            "p_correct": round(p_correct(state, learner, [cid], cefr_levels), 4),
        }
    return {
        "learner": learner,
        "theta": state.thetas.get(learner, 0.0),
        "constructs": constructs,
    }


# --- simulation -------------------------------------------------------------


def simulate(learners: int = 200, constructs: int = 100, answers: int = 100,
             seed: int = 7, theta_sigma: float = 1.0,
             b_sigma: float = 1.0) -> tuple[list[AttemptEvent], dict]:
    """Planted-parameter recovery run for the estimator.

    Draws true abilities and difficulties from the planted
    distributions, simulates one answer event per (learner, trial) and
    reports the correlation of the recovered parameters with the
    planted ones.
    """
    if min(learners, constructs, answers) <= 0:
        raise DegenerateData("simulation counts must be positive")
    rng = random.Random(seed)
    theta_true = [rng.gauss(0.0, theta_sigma) for _ in range(learners)]
    b_true = [rng.gauss(0.0, b_sigma) for _ in range(constructs)]
    center = sum(b_true) / len(b_true)
    b_true = [b - center for b in b_true]
    theta_true = [t - center for t in theta_true]
    events: list[AttemptEvent] = []
    clock = 0.0
    for l in range(learners):
        for k in range(answers):
            c = rng.randrange(constructs)
            p = logistic(theta_true[l] - b_true[c])
            correct = rng.random() < p
            clock += 1.0
            events.append(AttemptEvent(
                learner=f"learner-{l:04d}",
                exercise=f"sim-{l:04d}-{k:04d}",
                constructs=(f"construct-{c:04d}",),
                ordinal=1,
                kind="answer",
                given=None,
                correct=correct,
                hints_used=0,
                timestamp=clock,
            ))
    observations = replay_events(events)
    state = estimate(observations)
    theta_hat = [state.thetas[f"learner-{l:04d}"] for l in range(learners)]
    b_hat = [state.difficulties.get(f"construct-{c:04d}", 0.0) for c in range(constructs)]
    r_theta = _correlation(theta_true, theta_hat)
    r_b = _correlation(b_true, b_hat)
    report = {
        "learners": learners,
        "constructs": constructs,
        "answers": answers,
        "seed": seed,
        "events": len(events),
        "iterations": state.iterations,
        "r_theta": None if r_theta is None else round(r_theta, 4),
        "r_b": None if r_b is None else round(r_b, 4),
        "b_hat_spread": round(max(b_hat) - min(b_hat), 4),
    }
    return events, report


def _correlation(xs: list[float], ys: list[float]) -> float | None:
    # None when either side is constant; corrcoef would divide by zero
    if len(xs) < 2 or np.std(xs) == 0.0 or np.std(ys) == 0.0:
        return None
    return float(np.corrcoef(xs, ys)[0, 1])
