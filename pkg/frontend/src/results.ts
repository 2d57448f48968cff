// Result gallery rendering. The server's order is the displayed order:
// entries are appended exactly as received, never re-sorted or filtered.

import type { ClipResultEntry, ClipseekApi, MotionResultEntry } from "./api";

export function renderClipResults(
  container: HTMLElement,
  entries: ClipResultEntry[],
  api: ClipseekApi,
  onSelect?: (vId: number) => void,
): void {
  container.replaceChildren();
  if (entries.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No results — the catalog may be empty.";
    container.appendChild(empty);
    return;
  }
  for (const entry of entries) {
    const card = document.createElement("div");
    card.className = "result-card";
    card.dataset.vId = String(entry.v_id);

    const img = document.createElement("img");
    img.src = api.thumbnailUrl(entry.thumbnail_url);
    img.alt = `keyframe of ${entry.v_name}`;
    img.loading = "lazy";
    img.width = 60;
    img.height = 60;
    card.appendChild(img);

    const label = document.createElement("div");
    label.className = "result-label";
    label.textContent = `${entry.v_name} (#${entry.v_id})`;
    card.appendChild(label);

    const distance = document.createElement("div");
    distance.className = "result-metric";
    distance.textContent = `distance ${entry.distance.toFixed(6)}`;
    card.appendChild(distance);

    if (onSelect) {
      card.addEventListener("click", () => onSelect(entry.v_id));
    }
    container.appendChild(card);
  }
}

export function renderMotionResults(
  container: HTMLElement,
  entries: MotionResultEntry[],
): void {
  container.replaceChildren();
  if (entries.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No motion matches — no stored trajectories yet.";
    container.appendChild(empty);
    return;
  }
  for (const entry of entries) {
    const row = document.createElement("div");
    row.className = "result-card";
    row.dataset.vId = String(entry.v_id);
    row.textContent = `${entry.v_name} (#${entry.v_id}) — score ${entry.score.toFixed(4)}`;
    container.appendChild(row);
  }
}

export function renderedOrder(container: HTMLElement): number[] {
  return Array.from(container.querySelectorAll<HTMLElement>("[data-v-id]")).map((el) =>
    Number(el.dataset.vId),
  );
}
