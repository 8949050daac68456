/**
 * The bench controller: every user action goes to the engine over the v1
 * API, and the view re-renders only from acknowledged responses. No
 * client-side arithmetic happens anywhere — entries stay "p/q" strings.
 */

import { ApiError, BenchApi, ConnectionLostError } from "./api.js";
import { render } from "./render.js";
import { ViewStore } from "./state.js";
import type { MatrixJson, Mode, RowOp, Transcript } from "./types.js";

/** Tokenize CSV text into the wire matrix form; tokens pass through verbatim. */
export function parseMatrixText(text: string): MatrixJson {
  const rows = text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => line.split(",").map((token) => token.trim()));
  if (rows.length === 0) {
    throw new Error("enter at least one matrix row");
  }
  const width = rows[0]?.length ?? 0;
  if (rows.some((row) => row.length !== width)) {
    throw new Error("all rows need the same number of entries");
  }
  return { rows: rows.length, cols: width, data: rows };
}

export class BenchApp {
  readonly store = new ViewStore();

  constructor(
    private readonly api: BenchApi,
    private readonly doc: Document,
    private readonly root: ParentNode,
  ) {
    this.store.subscribe((state) => render(this.doc, this.root, state));
  }

  private sessionId(): string {
    const id = this.store.getState().session?.id;
    if (!id) throw new Error("no active session");
    return id;
  }

  private async guarded<T>(action: () => Promise<T>): Promise<T | undefined> {
    try {
      return await action();
    } catch (error) {
      if (error instanceof ConnectionLostError) {
        this.store.connectionFailed();
      } else if (error instanceof ApiError) {
        this.store.errorReceived(`${error.code}: ${error.message}`);
      } else {
        this.store.errorReceived(String(error));
      }
      return undefined;
    }
  }

  async loadSession(matrixText: string, mode: Mode, bText?: string): Promise<void> {
    await this.guarded(async () => {
      const matrix = parseMatrixText(matrixText);
      const b =
        mode === "krylov"
          ? (bText ?? "").split(",").map((token) => token.trim()).filter((t) => t.length)
          : undefined;
      const created = await this.api.createSession(matrix, mode, b);
      this.store.sessionCreated(created.state);
    });
  }

  async refresh(): Promise<void> {
    await this.guarded(async () => {
      const state = await this.api.getState(this.sessionId());
      this.store.stateAcknowledged(state);
    });
  }

  async applyOp(op: RowOp): Promise<boolean> {
    const outcome = await this.guarded(() => this.api.applyOp(this.sessionId(), op));
    if (outcome === undefined) return false;
    this.store.opApplied(outcome);
    return outcome.accepted;
  }

  async requestHint(): Promise<void> {
    await this.guarded(async () => {
      const hint = await this.api.hint(this.sessionId());
      this.store.hintReceived(hint);
    });
  }

  /** Apply the op currently suggested in the hint panel. */
  async applyHint(): Promise<boolean> {
    const hint = this.store.getState().hint;
    if (!hint) return false;
    return this.applyOp(hint.op);
  }

  async whatIf(op: RowOp): Promise<void> {
    await this.guarded(async () => {
      const preview = await this.api.whatIf(this.sessionId(), op);
      this.store.previewReceived(preview);
    });
  }

  dismissPreview(): void {
    this.store.clearPreview();
  }

  async exportTranscript(): Promise<Transcript | undefined> {
    return this.guarded(() => this.api.exportTranscript(this.sessionId()));
  }
}
