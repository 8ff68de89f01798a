/** Wire types for the tutoring API, /api/v1. Shapes mirror server responses exactly. */

export interface User {
  id: string;
  name: string;
  role: "learner" | "teacher";
  token: string;
  level: string | null;
}

export interface StoryMeta {
  id: string;
  owner: string;
  title: string;
  language: string;
  visibility: "private" | "public";
}

export interface MorphAnalysis {
  lemma: string;
  pos: string;
  features: Record<string, string>;
}

export interface PreviewToken {
  surface: string;
  start: number;
  end: number;
  sentence: number;
  analyses: MorphAnalysis[];
  chosen: MorphAnalysis | null;
  ambiguous: boolean;
  candidate: boolean;
  constructs: string[];
}

export interface PreviewChunk {
  kind: string;
  start: number;
  end: number;
  head: number;
}

export interface PreviewConstruct {
  construct: string;
  sentence: number;
  matched: number[];
  candidates: number[];
  name: string;
  cefr: string;
}

export interface PreviewCandidate {
  span: [number, number];
  links: string[];
  answer: string;
  hint_lemma: string;
}

export interface Preview {
  story: string;
  text: string;
  sentences: [number, number][];
  paragraphs: [number, number][];
  tokens: PreviewToken[];
  chunks: PreviewChunk[];
  constructs: PreviewConstruct[];
  candidates: PreviewCandidate[];
}

export interface Translation {
  token: string;
  gloss: string;
}

export interface Blank {
  start: number;
  end: number;
}

export interface Exercise {
  id: string;
  kind: "cloze" | "mc";
  sentence: string;
  sentence_index: number;
  blank: Blank;
  hint_lemma: string;
  links: string[];
  hearts: number;
  attempts_left: number;
  finished: boolean;
  correct: boolean | null;
  options?: string[];
  construct?: string;
  answer?: string;
}

export interface Session {
  id: string;
  story: StoryMeta;
  seed: number;
  density: number;
  exercises: Exercise[];
}

export interface AnswerDiff {
  given: string;
  oov: boolean;
  lemma_match: boolean;
  mismatches: [string, string, string][];
  summary: string;
}

export interface Hint {
  level: number;
  text: string;
  target: number;
}

export interface AnswerResult {
  correct: boolean;
  hearts: number;
  finished: boolean;
  diff?: AnswerDiff;
  hint?: Hint;
  exhausted?: boolean;
  answer?: string;
}

export interface HintResult {
  hint: Hint | null;
  hearts: number;
}

export interface ConstructProgress {
  observations: number;
  successes: number;
  rate: number;
  trend: number;
  p_correct: number;
}

export interface ProgressReport {
  learner: string;
  theta: number;
  constructs: Record<string, ConstructProgress>;
}

export interface PlacementItem {
  id: string;
  sentence: string;
  blank: Blank;
  hint_lemma: string;
}

export interface PlacementState {
  id?: string;
  finished: boolean;
  item?: PlacementItem;
  correct?: boolean;
  answered?: number;
  theta?: number;
  se?: number;
  level?: string;
}
