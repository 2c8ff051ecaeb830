import type { InfeasiblePayload, Snapshot } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class InfeasibleError extends Error {
  constructor(readonly payload: InfeasiblePayload) {
    super(`no portfolio reaches ${payload.threshold} for every risk`);
  }
}

export class ServiceUnreachableError extends Error {}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client; all state lives on the service side. */
export class ApiClient {
  constructor(private readonly fetchFn: FetchLike = (input, init) => fetch(input, init)) {}

  async getState(): Promise<Snapshot> {
    return (await this.request("/api/state")) as Snapshot;
  }

  async setPortfolio(selected: string[]): Promise<Snapshot> {
    return (await this.request("/api/portfolio", { selected })) as Snapshot;
  }

  /** Resolves to the applied snapshot, or rejects with InfeasibleError while
   * the service keeps the previous selection. */
  async optimize(threshold: number, cutoff: number): Promise<Snapshot> {
    return (await this.request("/api/optimize", { threshold, cutoff })) as Snapshot;
  }

  private async request(path: string, body?: unknown): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchFn(
        path,
        body === undefined
          ? undefined
          : {
              method: "POST",
              headers: { "Content-Type": "application/json" },
              body: JSON.stringify(body),
            },
      );
    } catch (cause) {
      throw new ServiceUnreachableError(String(cause));
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      // fall through to the status handling below
    }
    if (response.ok) {
      return payload;
    }
    if (
      response.status === 409 &&
      payload !== null &&
      (payload as InfeasiblePayload).error === "infeasible"
    ) {
      throw new InfeasibleError(payload as InfeasiblePayload);
    }
    const message =
      payload !== null && typeof (payload as { error?: string }).error === "string"
        ? (payload as { error: string }).error
        : `request failed with status ${response.status}`;
    throw new ApiError(message, response.status);
  }
}
