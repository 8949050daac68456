/**
 * Wire types for the v1 lesson-bench API. Rational entries travel as "p/q"
 * strings end to end; the client never does arithmetic on them.
 */

export interface MatrixJson {
  rows: number;
  cols: number;
  domain?: string;
  data: string[][];
}

export type Mode = "reduce_to_ref" | "reduce_to_rref" | "krylov";

export type RowOp =
  | { kind: "Swap"; i: number; j: number }
  | { kind: "Scale"; i: number; factor: string }
  | { kind: "AddMultiple"; src: number; factor: string; dst: number }
  | { kind: "AppendIterate" };

export interface Analysis {
  pivots: [number, number][];
  free_cols: number[];
  rank: number;
}

export interface SessionState {
  id: string;
  mode: Mode;
  status: "in_progress" | "goal_reached";
  initial: MatrixJson;
  current: MatrixJson;
  step_count: number;
  analysis: Analysis;
  b?: string[];
  annihilator?: string;
}

export interface CreateResponse {
  id: string;
  state: SessionState;
}

export interface ApplyResponse {
  accepted: boolean;
  note: string;
  state: SessionState;
}

export interface HintResponse {
  op: RowOp;
  rationale: string;
  resulting_pivot: [number, number] | null;
}

export interface WhatIfResponse {
  preview: MatrixJson;
  would_reach_goal: boolean;
  note: string;
  annihilator?: string;
}

export interface TranscriptStep {
  op: RowOp;
  annotation: string;
  after: string[][];
}

export interface Transcript {
  version: string;
  id: string;
  mode: Mode;
  status: string;
  initial: MatrixJson;
  steps: TranscriptStep[];
  b?: string[];
  annihilator?: string;
}

export interface ApiFailure {
  code: string;
  message: string;
}
