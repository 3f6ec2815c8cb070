// HTML string renderers: kept DOM-free so they run under plain node tests.

import type { DatasetProfile } from "./api.js";
import type { ArtifactView, TurnView } from "./views.js";
import { pageOf, pageCount } from "./views.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderProfileSummary(profile: DatasetProfile): string {
  const items = profile.columns
    .map((col) => {
      let detail = "";
      if (col.kind === "numeric" && col.numeric_range) {
        detail = ` (${col.numeric_range[0]} to ${col.numeric_range[1]})`;
      } else if (col.kind === "categorical" && col.exemplars.length > 0) {
        detail = `: ${col.exemplars.slice(0, 5).join(", ")}`;
      }
      return `<li><strong>${escapeHtml(col.name)}</strong> <em>${col.kind}</em>${escapeHtml(detail)}</li>`;
    })
    .join("");
  return (
    `<div class="profile-summary">` +
    `<p>${escapeHtml(profile.name)} — ${profile.row_count} rows, ${profile.columns.length} columns</p>` +
    `<ul>${items}</ul></div>`
  );
}

function renderTable(view: Extract<ArtifactView, { type: "table" }>, page: number): string {
  const rows = view.paginated ? pageOf(view.rows, page) : view.rows;
  const header = view.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = rows
    .map(
      (row) =>
        `<tr>${view.columns
          .map((c) => `<td>${escapeHtml(String(row[c] ?? ""))}</td>`)
          .join("")}</tr>`,
    )
    .join("");
  const pages = pageCount(view.rows.length);
  const pager = view.paginated
    ? `<div class="pager" data-pages="${pages}" data-page="${page}">` +
      `<button data-step="-1">prev</button>` +
      `<span>page ${page + 1} of ${pages}</span>` +
      `<button data-step="1">next</button></div>`
    : "";
  const note = view.truncated
    ? `<p class="truncation-note">showing the first ${view.rows.length} of ${view.totalRows} rows</p>`
    : "";
  return `<div class="table-wrap"><table><thead><tr>${header}</tr></thead><tbody>${body}</tbody></table>${pager}${note}</div>`;
}

export function renderArtifact(view: ArtifactView, page = 0): string {
  switch (view.type) {
    case "image":
      return `<figure><img src="${view.url}" alt="${escapeHtml(view.caption)}"><figcaption>${escapeHtml(view.caption)}</figcaption></figure>`;
    case "table":
      return renderTable(view, page);
    case "scalar":
      return `<p class="scalar-result">${escapeHtml(view.value)}</p>`;
    case "text":
      return `<pre class="text-result">${escapeHtml(view.text)}</pre>`;
    case "narration": {
      const cls = view.isError ? "narration error-notice" : "narration";
      return `<p class="${cls}">${escapeHtml(view.text)}</p>`;
    }
    case "none":
      return "";
  }
}

export function renderTurn(view: TurnView, page = 0): string {
  const badgeClass = view.badge.action === "code_generation" ? "badge-code" : "badge-chat";
  const fallback = view.badge.fallback ? ` <span class="badge-fallback">fallback</span>` : "";
  const origin = view.inputOrigin === "speech" ? " 🎤" : "";
  const codePanel =
    view.codePanel !== null
      ? `<details class="code-panel" open><summary>generated code</summary><pre><code>${escapeHtml(view.codePanel)}</code></pre></details>`
      : "";
  const audio =
    view.audioUrl !== null
      ? `<audio controls src="${view.audioUrl}"></audio>`
      : "";
  return (
    `<article class="turn" data-turn-id="${view.turnId}">` +
    `<div class="user-line">${escapeHtml(view.userText)}${origin}</div>` +
    `<span class="decision-badge ${badgeClass}">${view.badge.action}</span>${fallback}` +
    renderArtifact(view.artifact, page) +
    codePanel +
    audio +
    `<div class="timing-strip">${escapeHtml(view.timingStrip)}</div>` +
    `</article>`
  );
}

export function renderError(message: string): string {
  return `<div class="notice error-notice" role="alert">${escapeHtml(message)}<button class="dismiss">×</button></div>`;
}
