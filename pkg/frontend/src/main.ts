// DOM wiring for the single-page chat interface. All analytical state lives
// server-side; this file only reflects stored turn records.

import { ApiClient, ApiError } from "./api.js";
import { MicRecorder, toBase64 } from "./recorder.js";
import { renderError, renderProfileSummary, renderTurn } from "./render.js";
import { SessionFlow } from "./state.js";

const apiBase = (window as { TABCHAT_API?: string }).TABCHAT_API ?? "";
const api = new ApiClient(apiBase);
const flow = new SessionFlow(api);
const recorder = new MicRecorder();

const el = {
  upload: document.querySelector<HTMLInputElement>("#dataset-file")!,
  profile: document.querySelector<HTMLElement>("#profile")!,
  conversation: document.querySelector<HTMLElement>("#conversation")!,
  form: document.querySelector<HTMLFormElement>("#ask-form")!,
  query: document.querySelector<HTMLInputElement>("#query")!,
  send: document.querySelector<HTMLButtonElement>("#send")!,
  mic: document.querySelector<HTMLButtonElement>("#mic")!,
  wantAudio: document.querySelector<HTMLInputElement>("#want-audio")!,
  notices: document.querySelector<HTMLElement>("#notices")!,
};

function notify(message: string): void {
  el.notices.insertAdjacentHTML("beforeend", renderError(message));
}

el.notices.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.classList.contains("dismiss")) {
    target.closest(".notice")?.remove();
  }
});

function setBusy(busy: boolean): void {
  el.send.disabled = busy || !flow.ready;
  el.query.disabled = busy;
  el.mic.disabled = busy && !recorder.active;
}

function appendTurnHtml(html: string): void {
  el.conversation.insertAdjacentHTML("beforeend", html);
  el.conversation.lastElementChild?.scrollIntoView({ behavior: "smooth" });
}

function wirePagers(): void {
  el.conversation.addEventListener("click", (event) => {
    const button = event.target as HTMLElement;
    const step = button.getAttribute("data-step");
    const pager = button.closest<HTMLElement>(".pager");
    if (!step || !pager) {
      return;
    }
    const pages = Number(pager.dataset.pages ?? "1");
    const current = Number(pager.dataset.page ?? "0");
    const next = Math.min(pages - 1, Math.max(0, current + Number(step)));
    if (next === current) {
      return;
    }
    const article = pager.closest<HTMLElement>(".turn");
    const turn = flow.turns.find((t) => t.turnId === article?.dataset.turnId);
    if (!turn || !article) {
      return;
    }
    article.outerHTML = renderTurn(turn, next);
  });
}

async function handle(action: () => Promise<void>): Promise<void> {
  setBusy(true);
  try {
    await action();
  } catch (error) {
    notify(error instanceof ApiError ? error.message : String(error));
  } finally {
    setBusy(false);
  }
}

el.upload.addEventListener("change", () =>
  handle(async () => {
    const file = el.upload.files?.[0];
    if (!file) {
      return;
    }
    const profile = await flow.upload(file, file.name);
    el.profile.innerHTML = renderProfileSummary(profile);
    el.conversation.innerHTML = "";
  }),
);

el.form.addEventListener("submit", (event) => {
  event.preventDefault();
  const text = el.query.value.trim();
  if (!text) {
    return;
  }
  void handle(async () => {
    const view = await flow.sendText(text, el.wantAudio.checked);
    appendTurnHtml(renderTurn(view));
    el.query.value = "";
  });
});

el.mic.addEventListener("click", () =>
  handle(async () => {
    if (!recorder.active) {
      await recorder.start();
      el.mic.textContent = "stop";
      return;
    }
    el.mic.textContent = "record";
    const recording = await recorder.stop();
    const view = await flow.sendAudio(toBase64(recording.wavBytes));
    appendTurnHtml(renderTurn(view));
  }),
);

wirePagers();
setBusy(false);
