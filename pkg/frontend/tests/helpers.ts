import type { Artifact, Decision, StageTimings, TurnRecord } from "../src/api.js";

export function decision(overrides: Partial<Decision> = {}): Decision {
  return { action: "code_generation", rationale: "", fallback: false, ...overrides };
}

export function timings(overrides: Partial<StageTimings> = {}): StageTimings {
  return { t_dec: 0.1, t_code: null, t_exec: null, t_chat: null, t_tts: null, ...overrides };
}

export function figureArtifact(overrides: Partial<Artifact> = {}): Artifact {
  return {
    status: "ok",
    kind: "figure",
    payload: null,
    axes: { title: "Charges vs BMI", x_label: "BMI", y_label: "Charges" },
    error_summary: null,
    duration: 0.4,
    ...overrides,
  };
}

export function tableArtifact(rowCount: number): Artifact {
  const rows = Array.from({ length: rowCount }, (_, i) => ({ a: i, b: `v${i}` }));
  return {
    status: "ok",
    kind: "table",
    payload: { rows, total_rows: rowCount, truncated: false },
    axes: null,
    error_summary: null,
    duration: 0.1,
  };
}

export function turnRecord(overrides: Partial<TurnRecord> = {}): TurnRecord {
  return {
    turn_id: "t1",
    input_text: "Plot charges vs bmi",
    input_origin: "text",
    decision: decision(),
    code: "plt.scatter(df['bmi'], df['charges'])\nplt.show()",
    artifact: figureArtifact(),
    artifact_id: "abc123",
    narration: null,
    narration_is_error: false,
    audio_ref: null,
    timings: timings({ t_code: 0.2, t_exec: 0.3 }),
    ...overrides,
  };
}
