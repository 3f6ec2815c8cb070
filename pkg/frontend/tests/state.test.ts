import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionFlow } from "../src/state.js";
import { turnRecord } from "./helpers.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function scriptedClient(onTurn?: () => Promise<void>): ApiClient {
  const turns: unknown[] = [];
  return new ApiClient("", async (url, init) => {
    if (url.endsWith("/datasets")) {
      return jsonResponse({ dataset_id: "d1", profile: { name: "t", columns: [], row_count: 1, sample_rows: [], dataset_id: "d1" } });
    }
    if (url.endsWith("/sessions")) {
      return jsonResponse({ session_id: "s1" });
    }
    if (url.endsWith("/turns")) {
      if (onTurn) {
        await onTurn();
      }
      const body = JSON.parse(String(init?.body)) as { text?: string };
      const record = turnRecord({ turn_id: `t${turns.length + 1}`, input_text: body.text ?? "" });
      turns.push(record);
      return jsonResponse(record);
    }
    if (url.includes("/sessions/")) {
      return jsonResponse({ session_id: "s1", dataset_id: "d1", memory_capacity: 10, turns });
    }
    throw new Error(`unexpected url ${url}`);
  });
}

describe("SessionFlow", () => {
  it("requires an upload before turns", async () => {
    const flow = new SessionFlow(scriptedClient());
    await expect(flow.sendText("hi")).rejects.toThrow(/upload/);
  });

  it("runs upload -> session -> turns and accumulates views", async () => {
    const flow = new SessionFlow(scriptedClient());
    await flow.upload(new Blob(["a\n1\n"]), "a.csv");
    expect(flow.sessionId).toBe("s1");
    await flow.sendText("first");
    await flow.sendText("second");
    expect(flow.turns.map((t) => t.userText)).toEqual(["first", "second"]);
  });

  it("allows only one turn in flight", async () => {
    let release: () => void = () => {};
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const flow = new SessionFlow(scriptedClient(() => gate));
    await flow.upload(new Blob(["a\n1\n"]), "a.csv");
    const pending = flow.sendText("slow one");
    await expect(flow.sendText("too eager")).rejects.toThrow(/in flight/);
    release();
    await pending;
    await flow.sendText("fine now");
    expect(flow.turns).toHaveLength(2);
  });

  it("resync rebuilds the conversation from stored records", async () => {
    const flow = new SessionFlow(scriptedClient());
    await flow.upload(new Blob(["a\n1\n"]), "a.csv");
    await flow.sendText("first");
    flow.turns = []; // simulate a refresh losing local state
    const views = await flow.resync();
    expect(views).toHaveLength(1);
    expect(views[0].userText).toBe("first");
  });
});
