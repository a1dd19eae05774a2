/** Thin typed wrapper over the server's HTTP API. */

import { RecordRow, UserRow } from "./views.js";

export interface LoginResult {
  token: string;
  expires_at: number;
  user: UserRow;
}

export interface RecordDetail extends RecordRow {
  body: string;
  group: string | null;
  perm: string;
  created: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class Api {
  token: string | null = null;

  constructor(private base: string = "") {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const err = (payload as { error?: { code?: string; message?: string } }).error;
      throw new ApiError(response.status, err?.code ?? "http", err?.message ?? response.statusText);
    }
    return payload as T;
  }

  async login(login: string, password: string): Promise<LoginResult> {
    const result = await this.call<LoginResult>("POST", "/api/login", { login, password });
    this.token = result.token;
    return result;
  }

  listConstructions(): Promise<{ records: RecordRow[] }> {
    return this.call("GET", "/api/constructions");
  }

  getConstruction(recordId: string): Promise<RecordDetail> {
    return this.call("GET", `/api/constructions/${recordId}`);
  }

  createConstruction(title: string, body: string, perm?: string): Promise<RecordDetail> {
    return this.call("POST", "/api/constructions", { title, body, perm: perm ?? null });
  }

  updateConstruction(recordId: string, title: string, body: string, perm?: string): Promise<RecordDetail> {
    return this.call("PUT", `/api/constructions/${recordId}`, { title, body, perm: perm ?? null });
  }

  validate(source: string, samples = 1000, seed = 0): Promise<Record<string, unknown>> {
    return this.call("POST", "/api/validate", { source, samples, seed });
  }

  ownScrapbook(): Promise<{ records: RecordRow[] }> {
    return this.call("GET", "/api/scrapbook");
  }

  studentScrapbook(studentId: string): Promise<{ records: RecordRow[] }> {
    return this.call("GET", `/api/scrapbook/${studentId}`);
  }

  listUsers(): Promise<{ users: UserRow[] }> {
    return this.call("GET", "/api/users");
  }

  createUser(login_name: string, display_name: string, role: string, password: string): Promise<UserRow> {
    return this.call("POST", "/api/users", { login_name, display_name, role, password });
  }

  createSession(): Promise<{ session_id: string }> {
    return this.call("POST", "/api/sessions");
  }

  sessionInfo(sessionId: string): Promise<{
    session_id: string;
    teacher: string;
    members: string[];
    workbenches: Record<string, number>;
  }> {
    return this.call("GET", `/api/sessions/${sessionId}`);
  }

  endSession(sessionId: string): Promise<void> {
    return this.call("DELETE", `/api/sessions/${sessionId}`);
  }

  websocketUrl(sessionId: string): string {
    const proto = location.protocol === "https:" ? "wss:" : "ws:";
    return `${proto}//${location.host}/ws?session=${sessionId}&token=${this.token}`;
  }
}
