import { describe, expect, it } from "vitest";
import { IllegalTransition, PracticeViewState, statusOf } from "../src/state.js";
import type { AnswerResult, Exercise } from "../src/types.js";

function exercise(overrides: Partial<Exercise> = {}): Exercise {
  return {
    id: "story-1:2-2:cloze",
    kind: "cloze",
    sentence: "Kaupunki lisää aurinkopaneeleja katoille.",
    sentence_index: 0,
    blank: { start: 15, end: 31 },
    hint_lemma: "aurinkopaneeli",
    links: ["plural-partitive"],
    hearts: 5,
    attempts_left: 5,
    finished: false,
    correct: null,
    ...overrides,
  };
}

function wrong(hearts: number, exhausted = false): AnswerResult {
  const result: AnswerResult = {
    correct: false,
    hearts,
    finished: exhausted,
    diff: { given: "x", oov: true, lemma_match: false, mismatches: [], summary: "That form is not recognized." },
  };
  if (exhausted) {
    result.exhausted = true;
    result.answer = "aurinkopaneeleja";
  } else {
    result.hint = { level: 0, text: "hint", target: 2 };
  }
  return result;
}

const right: AnswerResult = { correct: true, hearts: 4, finished: true, answer: "aurinkopaneeleja" };

describe("statusOf", () => {
  it("reads untouched from a fresh server view", () => {
    expect(statusOf(exercise())).toBe("untouched");
  });

  it("reads answered-wrong from partial attempts", () => {
    expect(statusOf(exercise({ attempts_left: 3, hearts: 3 }))).toBe("answered-wrong");
  });

  it("reads terminal states from finished views", () => {
    expect(statusOf(exercise({ finished: true, correct: true }))).toBe("answered-correct");
    expect(statusOf(exercise({ finished: true, correct: false, attempts_left: 0 }))).toBe("exhausted");
  });
});

describe("PracticeViewState", () => {
  it("admits untouched to answered-correct", () => {
    const state = new PracticeViewState([exercise()]);
    const view = state.applyAnswer("story-1:2-2:cloze", right);
    expect(view.status).toBe("answered-correct");
    expect(view.answer).toBe("aurinkopaneeleja");
  });

  it("admits untouched to answered-wrong and on to exhausted", () => {
    const state = new PracticeViewState([exercise()]);
    expect(state.applyAnswer("story-1:2-2:cloze", wrong(4)).status).toBe("answered-wrong");
    expect(state.applyAnswer("story-1:2-2:cloze", wrong(3)).status).toBe("answered-wrong");
    expect(state.applyAnswer("story-1:2-2:cloze", wrong(0, true)).status).toBe("exhausted");
  });

  it("admits answered-wrong to answered-correct", () => {
    const state = new PracticeViewState([exercise()]);
    state.applyAnswer("story-1:2-2:cloze", wrong(4));
    expect(state.applyAnswer("story-1:2-2:cloze", right).status).toBe("answered-correct");
  });

  it("rejects any move out of answered-correct", () => {
    const state = new PracticeViewState([exercise()]);
    state.applyAnswer("story-1:2-2:cloze", right);
    expect(() => state.applyAnswer("story-1:2-2:cloze", wrong(3))).toThrow(IllegalTransition);
    expect(() => state.applyAnswer("story-1:2-2:cloze", right)).toThrow(IllegalTransition);
  });

  it("rejects any move out of exhausted", () => {
    const state = new PracticeViewState([exercise()]);
    for (const hearts of [4, 3, 2, 1]) state.applyAnswer("story-1:2-2:cloze", wrong(hearts));
    state.applyAnswer("story-1:2-2:cloze", wrong(0, true));
    expect(() => state.applyAnswer("story-1:2-2:cloze", right)).toThrow(IllegalTransition);
  });

  it("rejects exhausted straight from untouched", () => {
    const state = new PracticeViewState([exercise()]);
    expect(() => state.applyAnswer("story-1:2-2:cloze", wrong(0, true))).toThrow(IllegalTransition);
  });

  it("copies hearts and hints from responses without adjusting them", () => {
    const state = new PracticeViewState([exercise()]);
    const view = state.applyAnswer("story-1:2-2:cloze", wrong(4));
    expect(view.hearts).toBe(4);
    expect(view.hints.map((h) => h.text)).toEqual(["hint"]);
    const after = state.applyHint("story-1:2-2:cloze", { hint: { level: 1, text: "next", target: 2 }, hearts: 3 });
    expect(after.hearts).toBe(3);
    expect(after.hints.map((h) => h.text)).toEqual(["hint", "next"]);
  });

  it("keeps hearts unchanged when the hint comes back null", () => {
    const state = new PracticeViewState([exercise()]);
    const view = state.applyHint("story-1:2-2:cloze", { hint: null, hearts: 5 });
    expect(view.hearts).toBe(5);
    expect(view.hints).toEqual([]);
  });

  it("forbids two concurrent requests for the same exercise", () => {
    const state = new PracticeViewState([exercise()]);
    state.beginRequest("story-1:2-2:cloze");
    expect(state.busy("story-1:2-2:cloze")).toBe(true);
    expect(() => state.beginRequest("story-1:2-2:cloze")).toThrow(/in flight/);
    state.abortRequest("story-1:2-2:cloze");
    expect(state.busy("story-1:2-2:cloze")).toBe(false);
  });

  it("seeds terminal views from resumed sessions", () => {
    const state = new PracticeViewState([
      exercise({ finished: true, correct: true, answer: "aurinkopaneeleja" }),
    ]);
    const view = state.view("story-1:2-2:cloze");
    expect(view.status).toBe("answered-correct");
    expect(view.answer).toBe("aurinkopaneeleja");
    expect(() => state.applyAnswer("story-1:2-2:cloze", right)).toThrow(IllegalTransition);
  });
});
