// Pure view models: every rendered turn is derived from a stored TurnRecord,
// never from UI-side state, so a refresh reproduces the conversation.

import type { Artifact, TurnRecord } from "./api.js";

export const TABLE_PAGE_SIZE = 50;

export interface DecisionBadge {
  action: "code_generation" | "chat_response";
  fallback: boolean;
}

export type ArtifactView =
  | { type: "image"; url: string; caption: string }
  | {
      type: "table";
      columns: string[];
      rows: Record<string, unknown>[];
      totalRows: number;
      truncated: boolean;
      paginated: boolean;
    }
  | { type: "scalar"; value: string }
  | { type: "text"; text: string }
  | { type: "narration"; text: string; isError: boolean }
  | { type: "none" };

export interface TurnView {
  turnId: string;
  userText: string;
  inputOrigin: "text" | "speech";
  badge: DecisionBadge;
  artifact: ArtifactView;
  codePanel: string | null;
  timingStrip: string;
  audioUrl: string | null;
}

interface TablePayload {
  rows: Record<string, unknown>[];
  total_rows: number;
  truncated: boolean;
}

function tableView(payload: TablePayload): ArtifactView {
  const rows = payload.rows ?? [];
  const columns = rows.length > 0 ? Object.keys(rows[0]) : [];
  return {
    type: "table",
    columns,
    rows,
    totalRows: payload.total_rows ?? rows.length,
    truncated: Boolean(payload.truncated),
    paginated: rows.length > TABLE_PAGE_SIZE,
  };
}

function figureCaption(artifact: Artifact): string {
  return artifact.axes?.title || "figure";
}

function artifactView(
  record: TurnRecord,
  artifactUrl: (id: string) => string,
): ArtifactView {
  const artifact = record.artifact;
  if (record.decision.action === "chat_response") {
    return record.narration !== null
      ? { type: "narration", text: record.narration, isError: record.narration_is_error }
      : { type: "none" };
  }
  if (artifact === null) {
    return { type: "none" };
  }
  if (artifact.status !== "ok") {
    return {
      type: "narration",
      text: record.narration ?? artifact.error_summary ?? "execution failed",
      isError: true,
    };
  }
  switch (artifact.kind) {
    case "figure":
      // figures come from the artifact endpoint, never inline Base64
      return {
        type: "image",
        url: record.artifact_id ? artifactUrl(record.artifact_id) : "",
        caption: figureCaption(artifact),
      };
    case "table":
      return tableView(artifact.payload as TablePayload);
    case "scalar":
      return { type: "scalar", value: String(artifact.payload) };
    default:
      return { type: "text", text: String(artifact.payload ?? "") };
  }
}

function formatStage(name: string, value: number | null): string | null {
  return value === null ? null : `${name} ${value.toFixed(2)}s`;
}

export function timingStrip(record: TurnRecord): string {
  const t = record.timings;
  const parts = [
    formatStage("decide", t.t_dec),
    formatStage("code", t.t_code),
    formatStage("exec", t.t_exec),
    formatStage("chat", t.t_chat),
    formatStage("tts", t.t_tts),
  ].filter((p): p is string => p !== null);
  return parts.join(" · ");
}

export function buildTurnView(
  record: TurnRecord,
  artifactUrl: (id: string) => string,
): TurnView {
  const isCodePath = record.decision.action === "code_generation";
  return {
    turnId: record.turn_id,
    userText: record.input_text,
    inputOrigin: record.input_origin,
    badge: { action: record.decision.action, fallback: record.decision.fallback },
    artifact: artifactView(record, artifactUrl),
    // the code panel exists exactly when the turn took the code path
    codePanel: isCodePath ? record.code ?? "" : null,
    timingStrip: timingStrip(record),
    audioUrl: record.audio_ref ? artifactUrl(record.audio_ref) : null,
  };
}

export function pageOf<T>(rows: T[], page: number, pageSize = TABLE_PAGE_SIZE): T[] {
  const start = Math.max(0, page) * pageSize;
  return rows.slice(start, start + pageSize);
}

export function pageCount(totalShown: number, pageSize = TABLE_PAGE_SIZE): number {
  return Math.max(1, Math.ceil(totalShown / pageSize));
}
