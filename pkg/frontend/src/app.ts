import { ApiClient, InfeasibleError, ServiceUnreachableError } from "./api.js";
import { initialState, type ViewState } from "./state.js";
import { parseCutoff, parseThreshold, renderApp } from "./view.js";

/** Wires the pure renderer to the service client.
 *
 * Mutations are strictly sequential: controls are disabled while one request
 * is in flight, and the view re-renders only from confirmed responses, so
 * the board can never show a selection the service has not applied.
 */
export class ConsoleApp {
  private state: ViewState = initialState();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {
    root.addEventListener("click", (event) => this.onClick(event));
    root.addEventListener("change", (event) => this.onChange(event));
    root.addEventListener("input", (event) => this.onInput(event));
  }

  async start(): Promise<void> {
    this.update({ phase: "loading" });
    try {
      const snapshot = await this.api.getState();
      this.update({ phase: "ready", snapshot, banner: null });
    } catch {
      // No partial render on a dead service: the retry screen replaces all.
      this.update({ phase: "unreachable", snapshot: null });
    }
  }

  async toggleCountermeasure(name: string): Promise<void> {
    const snapshot = this.state.snapshot;
    if (snapshot === null || this.state.busy) {
      return;
    }
    const known = snapshot.countermeasures.map((cm) => cm.name);
    if (!known.includes(name)) {
      return;
    }
    const selected = snapshot.selection.includes(name)
      ? snapshot.selection.filter((n) => n !== name)
      : known.filter((n) => snapshot.selection.includes(n) || n === name);
    this.update({ busy: true });
    try {
      const next = await this.api.setPortfolio(selected);
      this.update({ busy: false, snapshot: next, banner: null });
    } catch (error) {
      this.fail(error, "The selection change was rejected; showing the last confirmed state.");
    }
  }

  async runOptimizer(): Promise<void> {
    if (this.state.snapshot === null || this.state.busy) {
      return;
    }
    const threshold = parseThreshold(this.state.thresholdInput);
    const cutoff = parseCutoff(this.state.cutoffInput);
    if (threshold === null || cutoff === null) {
      this.update({
        banner: {
          kind: "error",
          message: "Threshold must be in [0, 1] and cutoff must be non-negative.",
          uncoverable: [],
        },
      });
      return;
    }
    this.update({ busy: true });
    try {
      const snapshot = await this.api.optimize(threshold, cutoff);
      this.update({ busy: false, snapshot, banner: null });
    } catch (error) {
      if (error instanceof InfeasibleError) {
        // Selection unchanged on the service; keep the confirmed snapshot and
        // highlight what no portfolio can cover.
        this.update({
          busy: false,
          banner: {
            kind: "infeasible",
            message: `No portfolio reaches ${error.payload.threshold} for every risk. Uncoverable:`,
            uncoverable: error.payload.uncoverable,
          },
        });
        return;
      }
      this.fail(error, "The optimizer request failed; selection unchanged.");
    }
  }

  getState(): ViewState {
    return this.state;
  }

  rendered(): string {
    return this.root.innerHTML;
  }

  private fail(error: unknown, message: string): void {
    if (error instanceof ServiceUnreachableError) {
      this.update({ phase: "unreachable", snapshot: null, busy: false });
      return;
    }
    this.update({
      busy: false,
      banner: { kind: "error", message, uncoverable: [] },
    });
  }

  private update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    this.root.innerHTML = renderApp(this.state);
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement | null;
    if (target === null) {
      return;
    }
    const action = target.getAttribute("data-action");
    if (action === "optimize") {
      void this.runOptimizer();
    } else if (action === "retry") {
      void this.start();
    }
  }

  private onChange(event: Event): void {
    const target = event.target as HTMLElement | null;
    const name = target?.getAttribute("data-toggle");
    if (name) {
      void this.toggleCountermeasure(name);
    }
  }

  private onInput(event: Event): void {
    const target = event.target as HTMLInputElement | null;
    const field = target?.getAttribute("data-input");
    if (field === "threshold") {
      // Track without re-rendering so typing keeps focus; thresholds only
      // affect flagging on the next confirmed render.
      this.state = { ...this.state, thresholdInput: target!.value };
    } else if (field === "cutoff") {
      this.state = { ...this.state, cutoffInput: target!.value };
    }
  }
}
