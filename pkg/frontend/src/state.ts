import type { Snapshot } from "./types.js";

export interface Banner {
  kind: "error" | "infeasible";
  message: string;
  uncoverable: string[];
}

/** Everything the renderer needs. The snapshot is always the last confirmed
 * service response; there is no optimistic local state. */
export interface ViewState {
  phase: "loading" | "ready" | "unreachable";
  snapshot: Snapshot | null;
  busy: boolean;
  thresholdInput: string;
  cutoffInput: string;
  banner: Banner | null;
}

export function initialState(): ViewState {
  return {
    phase: "loading",
    snapshot: null,
    busy: false,
    thresholdInput: "0.8",
    cutoffInput: "0",
    banner: null,
  };
}
