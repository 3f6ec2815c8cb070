// Typed client for the engine's HTTP API. Fetch is injectable so tests can
// run without a network and integration tests can point at a live engine.

export interface ColumnProfile {
  name: string;
  kind: "numeric" | "categorical" | "datetime" | "text";
  numeric_range: [number, number] | null;
  exemplars: string[];
  null_count: number;
}

export interface DatasetProfile {
  dataset_id: string;
  name: string;
  row_count: number;
  columns: ColumnProfile[];
  sample_rows: Record<string, string>[];
}

export interface Decision {
  action: "code_generation" | "chat_response";
  rationale: string;
  fallback: boolean;
}

export interface Axes {
  title: string;
  x_label: string;
  y_label: string;
}

export interface Artifact {
  status: string;
  kind: "figure" | "table" | "scalar" | "text" | null;
  payload: unknown;
  axes: Axes | null;
  error_summary: string | null;
  duration: number;
}

export interface StageTimings {
  t_dec: number | null;
  t_code: number | null;
  t_exec: number | null;
  t_chat: number | null;
  t_tts: number | null;
}

export interface TurnRecord {
  turn_id: string;
  input_text: string;
  input_origin: "text" | "speech";
  decision: Decision;
  code: string | null;
  artifact: Artifact | null;
  artifact_id: string | null;
  narration: string | null;
  narration_is_error: boolean;
  audio_ref: string | null;
  timings: StageTimings;
}

export interface SessionView {
  session_id: string;
  dataset_id: string;
  memory_capacity: number;
  turns: TurnRecord[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody = { code: "internal", message: response.statusText };
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    // keep the status-line fallback
  }
  return new ApiError(response.status, body.code, body.message);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  async uploadDataset(
    file: Blob,
    filename: string,
  ): Promise<{ dataset_id: string; profile: DatasetProfile }> {
    const form = new FormData();
    form.append("file", file, filename);
    return this.request("/datasets", { method: "POST", body: form });
  }

  async createSession(
    datasetId: string,
    memoryCapacity?: number,
  ): Promise<string> {
    const body = JSON.stringify({
      dataset_id: datasetId,
      memory_capacity: memoryCapacity ?? null,
    });
    const reply = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body,
    });
    return reply.session_id;
  }

  async postTextTurn(
    sessionId: string,
    text: string,
    wantAudio = false,
  ): Promise<TurnRecord> {
    return this.request(`/sessions/${sessionId}/turns`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text, want_audio: wantAudio }),
    });
  }

  async postAudioTurn(
    sessionId: string,
    audioBase64: string,
    format = "wav",
    wantAudio = true,
  ): Promise<TurnRecord> {
    return this.request(`/sessions/${sessionId}/turns`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        audio_base64: audioBase64,
        audio_format: format,
        want_audio: wantAudio,
      }),
    });
  }

  async getSession(sessionId: string): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}`);
  }

  artifactUrl(artifactId: string): string {
    return `${this.baseUrl}/artifacts/${artifactId}`;
  }
}
