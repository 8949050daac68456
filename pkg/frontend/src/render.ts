/**
 * DOM rendering: the acknowledged snapshot becomes a table with pivot cells
 * and free columns highlighted; what-if previews render as a ghost table
 * next to it, visually distinct and never replacing the committed view.
 */

import type { ViewState } from "./state.js";
import type { Analysis, MatrixJson } from "./types.js";

export function matrixTable(
  doc: Document,
  matrix: MatrixJson,
  analysis: Analysis | null,
  ghost: boolean,
): HTMLTableElement {
  const table = doc.createElement("table");
  table.className = ghost ? "matrix ghost" : "matrix";
  const pivotSet = new Set((analysis?.pivots ?? []).map(([r, c]) => `${r},${c}`));
  const freeSet = new Set(analysis?.free_cols ?? []);
  const header = doc.createElement("tr");
  header.appendChild(doc.createElement("th"));
  for (let c = 0; c < matrix.cols; c += 1) {
    const th = doc.createElement("th");
    th.textContent = `c${c}`;
    if (freeSet.has(c)) th.classList.add("free");
    header.appendChild(th);
  }
  table.appendChild(header);
  for (let r = 0; r < matrix.rows; r += 1) {
    const tr = doc.createElement("tr");
    const label = doc.createElement("th");
    label.textContent = `r${r}`;
    tr.appendChild(label);
    for (let c = 0; c < matrix.cols; c += 1) {
      const td = doc.createElement("td");
      td.textContent = matrix.data[r]?.[c] ?? "";
      if (pivotSet.has(`${r},${c}`)) td.classList.add("pivot");
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  return table;
}

/** Canonical text form of the rendered matrix, for snapshot comparisons. */
export function matrixSignature(matrix: MatrixJson): string {
  return matrix.data.map((row) => row.join(",")).join(";");
}

function setText(root: ParentNode, selector: string, text: string): void {
  const el = root.querySelector(selector);
  if (el) el.textContent = text;
}

function setVisible(root: ParentNode, selector: string, visible: boolean): void {
  const el = root.querySelector<HTMLElement>(selector);
  if (el) el.hidden = !visible;
}

export function render(doc: Document, root: ParentNode, state: ViewState): void {
  const { session } = state;

  const current = root.querySelector("#current-matrix");
  if (current) {
    current.textContent = "";
    if (session) {
      current.appendChild(matrixTable(doc, session.current, session.analysis, false));
    }
  }

  const ghost = root.querySelector("#whatif-preview");
  if (ghost) {
    ghost.textContent = "";
    if (state.preview) {
      ghost.appendChild(matrixTable(doc, state.preview.preview, null, true));
      const caption = doc.createElement("p");
      caption.className = "ghost-caption";
      caption.textContent = state.preview.would_reach_goal
        ? `preview (would reach the goal): ${state.preview.note}`
        : `preview: ${state.preview.note}`;
      ghost.appendChild(caption);
    }
  }

  setVisible(root, "#goal-banner", session?.status === "goal_reached");
  setVisible(root, "#retry-banner", state.connectionLost);
  setText(root, "#message", state.message ?? "");
  setText(
    root,
    "#session-meta",
    session
      ? `session ${session.id.slice(0, 8)}… | mode ${session.mode} | rank ${session.analysis.rank} | steps ${session.step_count}`
      : "no session",
  );
  setText(
    root,
    "#annihilator",
    session?.annihilator ? `annihilator: ${session.annihilator}` : "",
  );

  const hintPanel = root.querySelector("#hint-panel");
  if (hintPanel) {
    hintPanel.textContent = "";
    if (state.hint) {
      const text = doc.createElement("p");
      text.textContent = `hint: ${JSON.stringify(state.hint.op)} — ${state.hint.rationale}`;
      hintPanel.appendChild(text);
    }
  }

  const notes = root.querySelector("#transcript");
  if (notes) {
    notes.textContent = "";
    state.notes.forEach((note, index) => {
      const li = doc.createElement("li");
      li.textContent = `[${index}] ${note}`;
      notes.appendChild(li);
    });
  }
}
