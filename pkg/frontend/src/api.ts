// Thin typed client over the documented HTTP+JSON API.

import type {
  CreateSessionResponse,
  DiffResponse,
  HistoryResponse,
  SessionSummary,
  StepResponse,
} from "./types.js";

const BASE = "";

export class ApiError extends Error {
  constructor(public status: number, public detail: unknown) {
    super(`HTTP ${status}: ${JSON.stringify(detail)}`);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(BASE + path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    throw new ApiError(response.status, body?.detail ?? body);
  }
  return body as T;
}

export function createSession(scenario: string): Promise<CreateSessionResponse> {
  return request("/sessions", {
    method: "POST",
    body: JSON.stringify({ scenario }),
  });
}

export function submitPrompt(
  sessionId: string,
  delta: string,
  budget = 2,
): Promise<StepResponse> {
  return request(`/sessions/${sessionId}/prompts`, {
    method: "POST",
    body: JSON.stringify({ delta, budget }),
  });
}

export function getSession(sessionId: string): Promise<SessionSummary> {
  return request(`/sessions/${sessionId}`);
}

export function getHistory(sessionId: string): Promise<HistoryResponse> {
  return request(`/sessions/${sessionId}/history`);
}

export function getDiff(sessionId: string, version: number): Promise<DiffResponse> {
  return request(`/sessions/${sessionId}/diff/${version}`);
}
