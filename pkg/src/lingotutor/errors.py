"""Exception types shared across the engine.

Every error the public operations can raise is defined here so callers
(service, CLI, tests) can map them uniformly.
"""

from __future__ import annotations


class TutorError(Exception):
    """Base class for all engine errors."""


# --- pack loading ---------------------------------------------------------


class PackError(TutorError):
    """Base class for language pack problems."""


class MissingFile(PackError):
    """A pack directory or one of its manifest-listed files is absent."""


class SchemaViolation(PackError):
    """A pack file is structurally invalid or breaks a pack invariant."""


class DanglingReference(PackError):
    """A pack component references something that does not exist."""


# --- morphology -----------------------------------------------------------


class UnknownLemma(TutorError):
    """generate() was asked about a lemma/pos pair not in the lexicon."""


class InvalidFeatures(TutorError):
    """A feature bundle uses a category or value absent from the schema."""


# --- pipeline / detection -------------------------------------------------


class EmptyInput(TutorError):
    """Text to annotate was empty or whitespace-only."""


class UnknownToken(TutorError):
    """A token index is out of range for the story."""


# --- exercises ------------------------------------------------------------


class NoCandidates(TutorError):
    """A story yielded no exercise candidates."""


class RecipeFailed(TutorError):
    """A distractor recipe produced fewer than two distinct options."""


class GenerationGap(TutorError):
    """A paraphrase slot has no realizable surface form."""


# --- learner model --------------------------------------------------------


class UnknownExercise(TutorError):
    """An attempt event references an exercise the state has never seen."""


class OutOfOrderAttempt(TutorError):
    """Attempt ordinals for an exercise must arrive consecutively."""


class ExhaustedAttempts(TutorError):
    """An answer arrived after the exercise was already finished."""


class DegenerateData(TutorError):
    """Estimation was asked to run on an empty observation set."""


class UnknownLearner(TutorError):
    """A learner id is absent from the skill state."""


class EmptyPool(TutorError):
    """sample_exercise() was given nothing to choose from."""


class NoLevel(TutorError):
    """A construct has neither estimated difficulty nor a CEFR level."""


class EmptyBank(TutorError):
    """Placement cannot start with an empty item bank."""


# --- service --------------------------------------------------------------


class Forbidden(TutorError):
    """The authenticated user may not see or touch the resource."""


class NotFound(TutorError):
    """The resource does not exist (or is hidden, indistinguishably)."""


class UnsupportedLanguage(TutorError):
    """No loaded pack matches the requested language."""
