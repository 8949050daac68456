/**
 * Browser bootstrap: wires the static controls in index.html to the
 * controller. The engine must be running (`matrixfirst serve`).
 */

import { BenchApi } from "./api.js";
import { BenchApp } from "./app.js";
import type { Mode, RowOp } from "./types.js";

function input(id: string): HTMLInputElement {
  return document.getElementById(id) as HTMLInputElement;
}

function intValue(id: string): number {
  return Number.parseInt(input(id).value, 10) || 0;
}

function readOpDraft(): RowOp {
  const kind = (document.getElementById("op-kind") as HTMLSelectElement).value;
  if (kind === "Swap") {
    return { kind: "Swap", i: intValue("op-i"), j: intValue("op-j") };
  }
  if (kind === "Scale") {
    return { kind: "Scale", i: intValue("op-i"), factor: input("op-factor").value };
  }
  if (kind === "AddMultiple") {
    return {
      kind: "AddMultiple",
      src: intValue("op-i"),
      factor: input("op-factor").value,
      dst: intValue("op-j"),
    };
  }
  return { kind: "AppendIterate" };
}

export function bootstrap(baseUrl: string): BenchApp {
  const api = new BenchApi(baseUrl);
  const app = new BenchApp(api, document, document);

  document.getElementById("load")?.addEventListener("click", () => {
    const mode = (document.getElementById("mode") as HTMLSelectElement).value as Mode;
    void app.loadSession(
      (document.getElementById("matrix-input") as HTMLTextAreaElement).value,
      mode,
      input("krylov-b").value,
    );
  });
  document.getElementById("apply")?.addEventListener("click", () => {
    void app.applyOp(readOpDraft());
  });
  document.getElementById("whatif")?.addEventListener("click", () => {
    void app.whatIf(readOpDraft());
  });
  document.getElementById("dismiss-preview")?.addEventListener("click", () => {
    app.dismissPreview();
  });
  document.getElementById("hint")?.addEventListener("click", () => {
    void app.requestHint();
  });
  document.getElementById("apply-hint")?.addEventListener("click", () => {
    void app.applyHint();
  });
  document.getElementById("retry")?.addEventListener("click", () => {
    void app.refresh();
  });
  document.getElementById("export")?.addEventListener("click", () => {
    void app.exportTranscript().then((transcript) => {
      if (!transcript) return;
      const blob = new Blob([JSON.stringify(transcript, null, 2)], {
        type: "application/json",
      });
      const url = URL.createObjectURL(blob);
      const anchor = document.createElement("a");
      anchor.href = url;
      anchor.download = `transcript-${transcript.id.slice(0, 8)}.json`;
      anchor.click();
      URL.revokeObjectURL(url);
    });
  });
  return app;
}

declare global {
  interface Window {
    benchApp?: BenchApp;
  }
}

if (typeof document !== "undefined" && document.getElementById("load")) {
  window.benchApp = bootstrap(
    (document.getElementById("engine-url") as HTMLInputElement | null)?.value ??
      "http://127.0.0.1:8000",
  );
}
