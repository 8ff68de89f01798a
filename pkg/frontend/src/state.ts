/** Client-side view state for one practice session. Mirrors server truth, decides nothing. */

import type { AnswerResult, Exercise, Hint, HintResult } from "./types.js";

export type ExerciseStatus = "untouched" | "answered-wrong" | "answered-correct" | "exhausted";

const transitions: Record<ExerciseStatus, ExerciseStatus[]> = {
  "untouched": ["answered-wrong", "answered-correct"],
  "answered-wrong": ["answered-wrong", "answered-correct", "exhausted"],
  "answered-correct": [],
  "exhausted": [],
};

export class IllegalTransition extends Error {
  constructor(from: ExerciseStatus, to: ExerciseStatus) {
    super(`illegal transition: ${from} -> ${to}`);
  }
}

export interface ExerciseView {
  status: ExerciseStatus;
  hearts: number;
  hints: Hint[];
  answer: string | null;
  inFlight: boolean;
}

/** Infer the status a server-side exercise view is already in. */
export function statusOf(exercise: Exercise): ExerciseStatus {
  if (exercise.finished) return exercise.correct ? "answered-correct" : "exhausted";
  return exercise.attempts_left < 5 ? "answered-wrong" : "untouched";
}

export class PracticeViewState {
  private readonly views = new Map<string, ExerciseView>();

  constructor(exercises: Exercise[]) {
    for (const exercise of exercises) {
      this.views.set(exercise.id, {
        status: statusOf(exercise),
        hearts: exercise.hearts,
        hints: [],
        answer: exercise.answer ?? null,
        inFlight: false,
      });
    }
  }

  view(exerciseId: string): ExerciseView {
    const view = this.views.get(exerciseId);
    if (!view) throw new Error(`unknown exercise: ${exerciseId}`);
    return view;
  }

  /** True while a submit or hint request is outstanding; submitting again is forbidden. */
  busy(exerciseId: string): boolean {
    return this.view(exerciseId).inFlight;
  }

  beginRequest(exerciseId: string): void {
    const view = this.view(exerciseId);
    if (view.inFlight) throw new Error(`request already in flight for ${exerciseId}`);
    view.inFlight = true;
  }

  abortRequest(exerciseId: string): void {
    this.view(exerciseId).inFlight = false;
  }

  private moveTo(view: ExerciseView, next: ExerciseStatus): void {
    if (!transitions[view.status].includes(next)) {
      throw new IllegalTransition(view.status, next);
    }
    view.status = next;
  }

  /** Fold a server answer verdict into the view. The server decides; we copy. */
  applyAnswer(exerciseId: string, result: AnswerResult): ExerciseView {
    const view = this.view(exerciseId);
    view.inFlight = false;
    view.hearts = result.hearts;
    if (result.hint) view.hints.push(result.hint);
    if (result.answer !== undefined) view.answer = result.answer;
    if (result.correct) {
      this.moveTo(view, "answered-correct");
    } else if (result.exhausted) {
      this.moveTo(view, "exhausted");
    } else {
      this.moveTo(view, "answered-wrong");
    }
    return view;
  }

  /** Fold a hint response into the view. A null hint costs nothing and changes no status. */
  applyHint(exerciseId: string, result: HintResult): ExerciseView {
    const view = this.view(exerciseId);
    view.inFlight = false;
    view.hearts = result.hearts;
    if (result.hint) view.hints.push(result.hint);
    return view;
  }
}
