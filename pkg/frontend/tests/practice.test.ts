import { beforeEach, describe, expect, it } from "vitest";
import { PracticeApi, renderPractice } from "../src/practice.js";
import type { AnswerResult, Exercise, HintResult, Session } from "../src/types.js";

function clozeExercise(): Exercise {
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
  };
}

function mcExercise(): Exercise {
  return {
    id: "story-1:7-7:mc:participle-that-clause",
    kind: "mc",
    sentence: "Hän kertoi vanhempien asuvan maalla.",
    sentence_index: 1,
    blank: { start: 11, end: 21 },
    hint_lemma: "vanhemmat",
    links: ["participle-that-clause"],
    hearts: 5,
    attempts_left: 5,
    finished: false,
    correct: null,
    options: ["vanhempia", "vanhempien", "vanhemmat"],
    construct: "participle-that-clause",
  };
}

function session(exercises: Exercise[]): Session {
  return {
    id: "session-1",
    story: { id: "story-1", owner: "u-1", title: "t", language: "fi", visibility: "private" },
    seed: 1,
    density: 3,
    exercises,
  };
}

interface Scripted {
  backend: PracticeApi;
  calls: { kind: "answer" | "hint"; given?: string }[];
  resolveNext(): Promise<void>;
}

/** Backend double that answers from a queue; resolution is manual so in-flight windows are testable. */
function scriptedBackend(answers: AnswerResult[], hints: HintResult[] = []): Scripted {
  const calls: Scripted["calls"] = [];
  const pending: (() => void)[] = [];
  const backend: PracticeApi = {
    submitAnswer(_token, _session, _exercise, given) {
      calls.push({ kind: "answer", given });
      return new Promise((resolve) => {
        pending.push(() => resolve(answers.shift()!));
      });
    },
    requestHint() {
      calls.push({ kind: "hint" });
      return new Promise((resolve) => {
        pending.push(() => resolve(hints.shift()!));
      });
    },
  };
  return {
    backend,
    calls,
    async resolveNext() {
      pending.shift()!();
      await Promise.resolve();
      await Promise.resolve();
    },
  };
}

const wrongResult: AnswerResult = {
  correct: false,
  hearts: 4,
  finished: false,
  diff: {
    given: "aurinkopaneeli",
    oov: false,
    lemma_match: true,
    mismatches: [["Number", "Plur", "Sing"], ["Case", "Par", "Nom"]],
    summary: "Check the form: singular number instead of plural number; nominative case instead of partitive case.",
  },
  hint: { level: 1, text: "Use another number.", target: 2 },
};

const correctResult: AnswerResult = { correct: true, hearts: 4, finished: true, answer: "aurinkopaneeleja" };

describe("renderPractice", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "";
    root = document.createElement("div");
    document.body.appendChild(root);
  });

  it("shows the lemma inside the cloze box", () => {
    const { backend } = scriptedBackend([]);
    renderPractice(root, session([clozeExercise()]), "tok", backend);
    const input = root.querySelector(".cloze") as HTMLInputElement;
    expect(input.placeholder).toBe("aurinkopaneeli");
  });

  it("renders choice options for multiple choice exercises", () => {
    const { backend } = scriptedBackend([]);
    renderPractice(root, session([mcExercise()]), "tok", backend);
    const options = [...root.querySelectorAll(".option-input")] as HTMLInputElement[];
    expect(options.map((o) => o.value)).toEqual(["vanhempia", "vanhempien", "vanhemmat"]);
  });

  it("turns the card blue and surfaces the hint on a wrong answer", async () => {
    const scripted = scriptedBackend([wrongResult]);
    renderPractice(root, session([clozeExercise()]), "tok", scripted.backend);
    const input = root.querySelector(".cloze") as HTMLInputElement;
    input.value = "aurinkopaneeli";
    (root.querySelector(".submit") as HTMLButtonElement).click();
    await scripted.resolveNext();
    const card = root.querySelector(".exercise") as HTMLElement;
    expect(card.classList.contains("wrong")).toBe(true);
    expect(card.classList.contains("correct")).toBe(false);
    expect(root.querySelector(".hint-text")!.textContent).toBe("Use another number.");
    expect(root.querySelector(".diff-summary")!.textContent).toContain("singular number");
    expect(root.querySelectorAll(".heart.white")).toHaveLength(4);
  });

  it("turns the card green and reveals the answer on a correct answer", async () => {
    const scripted = scriptedBackend([correctResult]);
    renderPractice(root, session([clozeExercise()]), "tok", scripted.backend);
    const input = root.querySelector(".cloze") as HTMLInputElement;
    input.value = "aurinkopaneeleja";
    (root.querySelector(".submit") as HTMLButtonElement).click();
    await scripted.resolveNext();
    const card = root.querySelector(".exercise") as HTMLElement;
    expect(card.classList.contains("correct")).toBe(true);
    expect(root.querySelector(".answer-text")!.textContent).toBe("aurinkopaneeleja");
    expect((root.querySelector(".submit") as HTMLButtonElement).disabled).toBe(true);
    expect((root.querySelector(".cloze") as HTMLInputElement).disabled).toBe(true);
  });

  it("disables submit while a request is in flight and sends nothing twice", async () => {
    const scripted = scriptedBackend([wrongResult]);
    renderPractice(root, session([clozeExercise()]), "tok", scripted.backend);
    const input = root.querySelector(".cloze") as HTMLInputElement;
    const submit = root.querySelector(".submit") as HTMLButtonElement;
    input.value = "x";
    submit.click();
    expect(submit.disabled).toBe(true);
    submit.click();
    submit.click();
    expect(scripted.calls).toHaveLength(1);
    await scripted.resolveNext();
    expect(submit.disabled).toBe(false);
  });

  it("ignores submit with an empty answer", () => {
    const scripted = scriptedBackend([]);
    renderPractice(root, session([clozeExercise()]), "tok", scripted.backend);
    (root.querySelector(".submit") as HTMLButtonElement).click();
    expect(scripted.calls).toHaveLength(0);
  });

  it("requires a picked option before submitting multiple choice", () => {
    const scripted = scriptedBackend([]);
    renderPractice(root, session([mcExercise()]), "tok", scripted.backend);
    const submit = root.querySelector(".submit") as HTMLButtonElement;
    submit.click();
    expect(scripted.calls).toHaveLength(0);
    const option = root.querySelectorAll(".option-input")[1] as HTMLInputElement;
    option.checked = true;
    submit.click();
    expect(scripted.calls).toEqual([{ kind: "answer", given: "vanhempien" }]);
  });

  it("drops to one white heart after four granted hints", async () => {
    const hints: HintResult[] = [
      { hint: { level: 0, text: "This is the object of the verb 'lisätä'.", target: 1 }, hearts: 4 },
      { hint: { level: 1, text: "Use another number.", target: 2 }, hearts: 3 },
      { hint: { level: 2, text: "Use another case.", target: 2 }, hearts: 2 },
      { hint: { level: 3, text: "Use plural number, partitive case.", target: 2 }, hearts: 1 },
    ];
    const expectedTexts = hints.map((h) => h.hint!.text);
    const scripted = scriptedBackend([], hints);
    renderPractice(root, session([clozeExercise()]), "tok", scripted.backend);
    const hintButton = root.querySelector(".hint-button") as HTMLButtonElement;
    for (let i = 0; i < 4; i++) {
      hintButton.click();
      await scripted.resolveNext();
    }
    expect(root.querySelectorAll(".heart.white")).toHaveLength(1);
    expect(root.querySelectorAll(".heart")).toHaveLength(5);
    expect([...root.querySelectorAll(".hint-text")].map((h) => h.textContent)).toEqual(expectedTexts);
  });

  it("keeps hearts untouched when the hint comes back null", async () => {
    const scripted = scriptedBackend([], [{ hint: null, hearts: 5 }]);
    renderPractice(root, session([clozeExercise()]), "tok", scripted.backend);
    (root.querySelector(".hint-button") as HTMLButtonElement).click();
    await scripted.resolveNext();
    expect(root.querySelectorAll(".heart.white")).toHaveLength(5);
    expect(root.querySelectorAll(".hint-text")).toHaveLength(0);
  });

  it("disables the whole card and reveals the answer when attempts run out", async () => {
    const last: AnswerResult = {
      correct: false,
      hearts: 0,
      finished: true,
      exhausted: true,
      answer: "aurinkopaneeleja",
      diff: { given: "z", oov: true, lemma_match: false, mismatches: [], summary: "That form is not recognized." },
    };
    const wrongs = [wrongResult, wrongResult, wrongResult, wrongResult].map((w, i) => ({ ...w, hearts: 4 - i }));
    const scripted = scriptedBackend([...wrongs, last]);
    renderPractice(root, session([clozeExercise()]), "tok", scripted.backend);
    const input = root.querySelector(".cloze") as HTMLInputElement;
    const submit = root.querySelector(".submit") as HTMLButtonElement;
    for (let i = 0; i < 5; i++) {
      input.value = "zzz";
      submit.click();
      await scripted.resolveNext();
    }
    const card = root.querySelector(".exercise") as HTMLElement;
    expect(card.classList.contains("exhausted")).toBe(true);
    expect(input.disabled).toBe(true);
    expect(submit.disabled).toBe(true);
    expect(root.querySelector(".answer-text")!.textContent).toBe("aurinkopaneeleja");
    expect(root.querySelectorAll(".heart.white")).toHaveLength(0);
  });

  it("seeds finished exercises from a resumed session as disabled", () => {
    const done: Exercise = {
      ...clozeExercise(),
      finished: true,
      correct: true,
      hearts: 3,
      attempts_left: 4,
      answer: "aurinkopaneeleja",
    };
    const { backend } = scriptedBackend([]);
    renderPractice(root, session([done]), "tok", backend);
    const card = root.querySelector(".exercise") as HTMLElement;
    expect(card.classList.contains("correct")).toBe(true);
    expect((root.querySelector(".submit") as HTMLButtonElement).disabled).toBe(true);
    expect(root.querySelector(".answer-text")!.textContent).toBe("aurinkopaneeleja");
  });

  it("shows a request error without changing exercise status", async () => {
    const backend: PracticeApi = {
      submitAnswer() {
        return Promise.reject(new Error("connection refused"));
      },
      requestHint() {
        return Promise.reject(new Error("connection refused"));
      },
    };
    renderPractice(root, session([clozeExercise()]), "tok", backend);
    const input = root.querySelector(".cloze") as HTMLInputElement;
    input.value = "x";
    (root.querySelector(".submit") as HTMLButtonElement).click();
    await Promise.resolve();
    await Promise.resolve();
    await Promise.resolve();
    const card = root.querySelector(".exercise") as HTMLElement;
    expect(root.querySelector(".request-error")!.textContent).toContain("connection refused");
    expect(card.classList.contains("wrong")).toBe(false);
    expect((root.querySelector(".submit") as HTMLButtonElement).disabled).toBe(false);
  });
});
