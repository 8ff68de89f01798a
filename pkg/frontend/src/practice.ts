/** Practice view: cloze and choice cards. Every verdict shown comes from a server response. */

import * as api from "./api.js";
import { clear, el } from "./dom.js";
import type { AnswerResult, Exercise, HintResult, Session } from "./types.js";
import { ExerciseView, PracticeViewState } from "./state.js";

export interface PracticeApi {
  submitAnswer(token: string, sessionId: string, exerciseId: string, given: string): Promise<AnswerResult>;
  requestHint(token: string, sessionId: string, exerciseId: string): Promise<HintResult>;
}

const HEART_COUNT = 5;

function paintHearts(row: HTMLElement, hearts: number): void {
  const doc = row.ownerDocument;
  clear(row);
  for (let i = 0; i < HEART_COUNT; i++) {
    const remaining = i < hearts;
    const glyph = el(doc, "span", remaining ? "heart white" : "heart spent", remaining ? "♡" : "♥");
    if (!remaining) glyph.style.opacity = "0.3";
    row.appendChild(glyph);
  }
}

interface Card {
  root: HTMLElement;
  input: HTMLInputElement | null;
  options: HTMLInputElement[];
  submit: HTMLButtonElement;
  hintButton: HTMLButtonElement;
  hearts: HTMLElement;
  hints: HTMLElement;
  feedback: HTMLElement;
  answer: HTMLElement;
}

function paintCard(card: Card, view: ExerciseView): void {
  const finished = view.status === "answered-correct" || view.status === "exhausted";
  card.root.classList.toggle("correct", view.status === "answered-correct");
  card.root.classList.toggle("wrong", view.status === "answered-wrong");
  card.root.classList.toggle("exhausted", view.status === "exhausted");
  if (view.status === "answered-correct") card.root.style.background = "#e4f7e4";
  else if (view.status === "answered-wrong") card.root.style.background = "#e4ecf7";
  else if (view.status === "exhausted") card.root.style.background = "#f0f0f0";

  paintHearts(card.hearts, view.hearts);

  const doc = card.root.ownerDocument;
  clear(card.hints);
  for (const hint of view.hints) {
    card.hints.appendChild(el(doc, "li", "hint-text", hint.text));
  }

  if (card.input) card.input.disabled = finished || view.inFlight;
  for (const option of card.options) option.disabled = finished || view.inFlight;
  card.submit.disabled = finished || view.inFlight;
  card.hintButton.disabled = finished || view.inFlight;

  clear(card.answer);
  if (finished && view.answer !== null) {
    card.answer.appendChild(el(doc, "span", "answer-label", "Answer: "));
    card.answer.appendChild(el(doc, "span", "answer-text", view.answer));
  }
}

function buildCard(
  doc: Document,
  exercise: Exercise,
  onSubmit: (card: Card, given: string) => void,
  onHint: (card: Card) => void,
): Card {
  const root = el(doc, "div", `exercise kind-${exercise.kind}`);
  root.dataset.id = exercise.id;

  const sentence = el(doc, "div", "exercise-sentence");
  const before = exercise.sentence.slice(0, exercise.blank.start);
  const after = exercise.sentence.slice(exercise.blank.end);
  sentence.appendChild(doc.createTextNode(before));

  let input: HTMLInputElement | null = null;
  const options: HTMLInputElement[] = [];
  if (exercise.kind === "cloze") {
    input = el(doc, "input", "cloze") as HTMLInputElement;
    input.type = "text";
    input.placeholder = exercise.hint_lemma;
    input.style.border = "1px solid #888";
    sentence.appendChild(input);
  } else {
    sentence.appendChild(el(doc, "span", "blank-slot", "_____"));
  }
  sentence.appendChild(doc.createTextNode(after));
  root.appendChild(sentence);

  if (exercise.kind === "mc") {
    const group = el(doc, "div", "options");
    for (const option of exercise.options ?? []) {
      const label = el(doc, "label", "option");
      const radio = el(doc, "input", "option-input") as HTMLInputElement;
      radio.type = "radio";
      radio.name = exercise.id;
      radio.value = option;
      options.push(radio);
      label.appendChild(radio);
      label.appendChild(doc.createTextNode(option));
      group.appendChild(label);
    }
    root.appendChild(group);
  }

  const controls = el(doc, "div", "controls");
  const submit = el(doc, "button", "submit", "Check") as HTMLButtonElement;
  const hintButton = el(doc, "button", "hint-button", "Hint") as HTMLButtonElement;
  const hearts = el(doc, "div", "hearts");
  controls.appendChild(submit);
  controls.appendChild(hintButton);
  controls.appendChild(hearts);
  root.appendChild(controls);

  const feedback = el(doc, "div", "feedback");
  const hints = el(doc, "ul", "hints");
  const answer = el(doc, "div", "answer");
  root.appendChild(feedback);
  root.appendChild(hints);
  root.appendChild(answer);

  const card: Card = { root, input, options, submit, hintButton, hearts, hints, feedback, answer };

  submit.addEventListener("click", () => {
    const given = input ? input.value : options.find((o) => o.checked)?.value ?? "";
    if (given === "") return;
    onSubmit(card, given);
  });
  if (input) {
    input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") submit.click();
    });
  }
  hintButton.addEventListener("click", () => onHint(card));
  return card;
}

export function renderPractice(
  root: HTMLElement,
  session: Session,
  token: string,
  backend: PracticeApi = api,
): PracticeViewState {
  const doc = root.ownerDocument;
  clear(root);
  root.className = "practice";
  const state = new PracticeViewState(session.exercises);

  for (const exercise of session.exercises) {
    const card = buildCard(
      doc,
      exercise,
      (card, given) => {
        if (state.busy(exercise.id)) return;
        state.beginRequest(exercise.id);
        paintCard(card, state.view(exercise.id));
        backend
          .submitAnswer(token, session.id, exercise.id, given)
          .then((result) => {
            const view = state.applyAnswer(exercise.id, result);
            clear(card.feedback);
            if (result.diff) {
              card.feedback.appendChild(el(doc, "p", "diff-summary", result.diff.summary));
            }
            paintCard(card, view);
          })
          .catch((err) => {
            state.abortRequest(exercise.id);
            clear(card.feedback);
            card.feedback.appendChild(el(doc, "p", "request-error", String(err)));
            paintCard(card, state.view(exercise.id));
          });
      },
      (card) => {
        if (state.busy(exercise.id)) return;
        state.beginRequest(exercise.id);
        paintCard(card, state.view(exercise.id));
        backend
          .requestHint(token, session.id, exercise.id)
          .then((result) => {
            paintCard(card, state.applyHint(exercise.id, result));
          })
          .catch((err) => {
            state.abortRequest(exercise.id);
            clear(card.feedback);
            card.feedback.appendChild(el(doc, "p", "request-error", String(err)));
            paintCard(card, state.view(exercise.id));
          });
      },
    );
    paintCard(card, state.view(exercise.id));
    root.appendChild(card.root);
  }
  return state;
}
