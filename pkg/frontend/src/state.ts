/**
 * View state for the bench: a store whose session snapshot can only ever be
 * replaced by a state the server has acknowledged. There is no optimistic
 * path — rejected ops and connection losses leave the rendered snapshot
 * untouched, and the local transcript view survives a dropped connection.
 */

import type {
  ApplyResponse,
  HintResponse,
  SessionState,
  WhatIfResponse,
} from "./types.js";

export interface ViewState {
  /** Last server-acknowledged session snapshot; the only thing rendered. */
  session: SessionState | null;
  /** Rejection or error text for the message area. */
  message: string | null;
  connectionLost: boolean;
  hint: HintResponse | null;
  /** Ghost-overlay preview; never replaces the session snapshot. */
  preview: WhatIfResponse | null;
  /** Local transcript view: annotations of accepted steps, in order. */
  notes: string[];
}

const INITIAL: ViewState = {
  session: null,
  message: null,
  connectionLost: false,
  hint: null,
  preview: null,
  notes: [],
};

export type Listener = (state: ViewState) => void;

export class ViewStore {
  private state: ViewState = { ...INITIAL };
  private listeners: Listener[] = [];

  getState(): Readonly<ViewState> {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private commit(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  sessionCreated(session: SessionState): void {
    this.commit({
      session,
      message: null,
      connectionLost: false,
      hint: null,
      preview: null,
      notes: [],
    });
  }

  /** A read (GET) or accepted mutation acknowledged by the server. */
  stateAcknowledged(session: SessionState): void {
    this.commit({ session, connectionLost: false });
  }

  opApplied(response: ApplyResponse): void {
    if (response.accepted) {
      this.commit({
        session: response.state,
        message: null,
        hint: null,
        preview: null,
        connectionLost: false,
        notes: [...this.state.notes, response.note],
      });
    } else {
      // the server echoes the unchanged state; only the message moves
      this.commit({
        message: `rejected: ${response.note}`,
        preview: null,
        connectionLost: false,
      });
    }
  }

  hintReceived(hint: HintResponse): void {
    this.commit({ hint, message: null, connectionLost: false });
  }

  previewReceived(preview: WhatIfResponse): void {
    this.commit({ preview, connectionLost: false });
  }

  clearPreview(): void {
    this.commit({ preview: null });
  }

  errorReceived(message: string): void {
    this.commit({ message });
  }

  /** Connection dropped: keep the snapshot and the transcript view. */
  connectionFailed(): void {
    this.commit({ connectionLost: true });
  }
}
