// Session flow: upload -> open session -> turns, with exactly one turn in
// flight, mirroring the engine's per-session serialization.

import { ApiClient, DatasetProfile, TurnRecord } from "./api.js";
import { buildTurnView, TurnView } from "./views.js";

export class SessionFlow {
  profile: DatasetProfile | null = null;
  sessionId: string | null = null;
  turns: TurnView[] = [];
  pending = false;

  constructor(private readonly api: ApiClient) {}

  get ready(): boolean {
    return this.sessionId !== null && !this.pending;
  }

  async upload(file: Blob, filename: string): Promise<DatasetProfile> {
    const reply = await this.api.uploadDataset(file, filename);
    this.profile = reply.profile;
    this.sessionId = await this.api.createSession(reply.dataset_id);
    this.turns = [];
    return reply.profile;
  }

  private appendRecord(record: TurnRecord): TurnView {
    const view = buildTurnView(record, (id) => this.api.artifactUrl(id));
    this.turns.push(view);
    return view;
  }

  async sendText(text: string, wantAudio = false): Promise<TurnView> {
    if (this.sessionId === null) {
      throw new Error("upload a dataset first");
    }
    if (this.pending) {
      throw new Error("a turn is already in flight");
    }
    this.pending = true;
    try {
      const record = await this.api.postTextTurn(this.sessionId, text, wantAudio);
      return this.appendRecord(record);
    } finally {
      this.pending = false;
    }
  }

  async sendAudio(base64: string, format = "wav"): Promise<TurnView> {
    if (this.sessionId === null) {
      throw new Error("upload a dataset first");
    }
    if (this.pending) {
      throw new Error("a turn is already in flight");
    }
    this.pending = true;
    try {
      const record = await this.api.postAudioTurn(this.sessionId, base64, format);
      return this.appendRecord(record);
    } finally {
      this.pending = false;
    }
  }

  // Rebuild every view from the stored records; a refresh must reproduce
  // the conversation exactly.
  async resync(): Promise<TurnView[]> {
    if (this.sessionId === null) {
      return [];
    }
    const session = await this.api.getSession(this.sessionId);
    this.turns = session.turns.map((record) =>
      buildTurnView(record, (id) => this.api.artifactUrl(id)),
    );
    return this.turns;
  }
}
