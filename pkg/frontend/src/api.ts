/** Thin fetch client for the tutoring API. No decisions happen here, only transport. */

import { getConfig } from "./config.js";
import type {
  AnswerResult,
  Exercise,
  HintResult,
  PlacementState,
  Preview,
  ProgressReport,
  Session,
  StoryMeta,
  Translation,
  User,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`${status}: ${detail}`);
    this.status = status;
    this.detail = detail;
  }
}

async function request<T>(method: string, path: string, token?: string, body?: unknown): Promise<T> {
  const headers: Record<string, string> = {};
  if (token) headers["Authorization"] = `Bearer ${token}`;
  if (body !== undefined) headers["Content-Type"] = "application/json";
  const response = await fetch(`${getConfig().baseUrl}/api/v1${path}`, {
    method,
    headers,
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail = typeof payload.detail === "string" ? payload.detail : JSON.stringify(payload.detail ?? payload);
    throw new ApiError(response.status, detail);
  }
  return payload as T;
}

export function register(name: string, role: "learner" | "teacher"): Promise<User> {
  return request("POST", "/auth/register", undefined, { name, role });
}

export function me(token: string): Promise<User> {
  return request("GET", "/me", token);
}

export function languages(token: string): Promise<string[]> {
  return request("GET", "/languages", token);
}

export function uploadStory(token: string, title: string, language: string, text: string): Promise<StoryMeta> {
  return request("POST", "/stories", token, { title, language, text });
}

export function listStories(token: string): Promise<StoryMeta[]> {
  return request("GET", "/stories", token);
}

export function preview(token: string, storyId: string): Promise<Preview> {
  return request("GET", `/stories/${storyId}/preview`, token);
}

export function translation(token: string, storyId: string, tokenIndex: number): Promise<Translation> {
  return request("GET", `/stories/${storyId}/tokens/${tokenIndex}/translation`, token);
}

export function startSession(token: string, storyId: string, density: number, seed: number): Promise<Session> {
  return request("POST", `/sessions?density=${density}&seed=${seed}`, token, { story: storyId });
}

export function getSession(token: string, sessionId: string): Promise<Session> {
  return request("GET", `/sessions/${sessionId}`, token);
}

export function submitAnswer(token: string, sessionId: string, exerciseId: string, given: string): Promise<AnswerResult> {
  return request("POST", `/sessions/${sessionId}/exercises/${exerciseId}/answer`, token, { given });
}

export function requestHint(token: string, sessionId: string, exerciseId: string): Promise<HintResult> {
  return request("POST", `/sessions/${sessionId}/exercises/${exerciseId}/hint`, token);
}

export function progress(token: string): Promise<ProgressReport> {
  return request("GET", "/progress", token);
}

export function startPlacement(token: string, language: string): Promise<PlacementState> {
  return request("POST", "/placement", token, { language });
}

export function answerPlacement(token: string, placementId: string, given: string): Promise<PlacementState> {
  return request("POST", `/placement/${placementId}/answer`, token, { given });
}

export type { Exercise };
