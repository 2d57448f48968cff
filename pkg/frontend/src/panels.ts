// The three client tasks as self-contained panels: register a video,
// search by clip, search by sketch. Errors surface inline without
// destroying form state; stale responses are dropped by sequence number.

import { ApiRequestError, ClipseekApi, RequestSequence } from "./api";
import { renderClipResults, renderMotionResults } from "./results";
import { SketchPad } from "./sketch";

function banner(el: HTMLElement, text: string, kind: "error" | "ok"): void {
  el.textContent = text;
  el.className = `banner ${kind}`;
  el.hidden = false;
}

function clearBanner(el: HTMLElement): void {
  el.hidden = true;
  el.textContent = "";
}

function describe(err: unknown): string {
  if (err instanceof ApiRequestError) return `${err.code}: ${err.message}`;
  return String(err);
}

export function createRegisterPanel(root: HTMLElement, api: ClipseekApi): void {
  root.innerHTML = `
    <h2>Register a video</h2>
    <label>Name <input type="text" name="video-name" maxlength="60"></label>
    <label>Frame archive (zip/tar) <input type="file" name="video-archive"></label>
    <button type="button" class="register-submit">Register</button>
    <p class="banner" hidden></p>
    <p class="confirmation" hidden></p>
  `;
  const nameInput = root.querySelector<HTMLInputElement>("input[name=video-name]")!;
  const fileInput = root.querySelector<HTMLInputElement>("input[name=video-archive]")!;
  const button = root.querySelector<HTMLButtonElement>(".register-submit")!;
  const bannerEl = root.querySelector<HTMLElement>(".banner")!;
  const confirmEl = root.querySelector<HTMLElement>(".confirmation")!;

  button.addEventListener("click", async () => {
    clearBanner(bannerEl);
    confirmEl.hidden = true;
    const name = nameInput.value.trim();
    const file = fileInput.files?.[0];
    if (!name) {
      banner(bannerEl, "Enter a video name before registering.", "error");
      return; // client-side validation: no request leaves the page
    }
    if (!file) {
      banner(bannerEl, "Choose a frame archive before registering.", "error");
      return;
    }
    button.disabled = true; // one in-flight registration at a time
    try {
      const summary = await api.registerVideo(name, file);
      confirmEl.textContent =
        `Registered "${summary.name}" as video #${summary.v_id} ` +
        `with ${summary.keyframe_count} keyframe(s).`;
      confirmEl.hidden = false;
    } catch (err) {
      banner(bannerEl, describe(err), "error"); // form state stays intact
    } finally {
      button.disabled = false;
    }
  });
}

export function createClipSearchPanel(root: HTMLElement, api: ClipseekApi): void {
  root.innerHTML = `
    <h2>Search by clip</h2>
    <label>Query frame archive <input type="file" name="query-archive"></label>
    <label>k <input type="range" name="k" min="1" max="50" value="10">
      <span class="k-value">10</span></label>
    <button type="button" class="search-submit">Search</button>
    <p class="banner" hidden></p>
    <div class="results"></div>
    <div class="detail" hidden></div>
  `;
  const fileInput = root.querySelector<HTMLInputElement>("input[name=query-archive]")!;
  const kInput = root.querySelector<HTMLInputElement>("input[name=k]")!;
  const kValue = root.querySelector<HTMLElement>(".k-value")!;
  const button = root.querySelector<HTMLButtonElement>(".search-submit")!;
  const bannerEl = root.querySelector<HTMLElement>(".banner")!;
  const resultsEl = root.querySelector<HTMLElement>(".results")!;
  const detailEl = root.querySelector<HTMLElement>(".detail")!;
  const sequence = new RequestSequence();

  kInput.addEventListener("input", () => {
    kValue.textContent = kInput.value;
  });

  async function showDetail(vId: number): Promise<void> {
    try {
      const detail = await api.videoDetail(vId);
      detailEl.replaceChildren();
      const h = document.createElement("h3");
      h.textContent = `${detail.v_name} (#${detail.v_id})`;
      detailEl.appendChild(h);
      const meta = document.createElement("p");
      meta.textContent =
        `stored ${detail.dostore}; ` +
        (detail.has_trajectory ? "has motion trajectory" : "no motion trajectory");
      detailEl.appendChild(meta);
      for (const kf of detail.keyframes) {
        const img = document.createElement("img");
        img.src = api.thumbnailUrl(kf.thumbnail_url);
        img.alt = kf.i_name;
        img.width = 45;
        img.height = 45;
        detailEl.appendChild(img);
      }
      detailEl.hidden = false;
    } catch (err) {
      banner(bannerEl, describe(err), "error");
    }
  }

  button.addEventListener("click", async () => {
    clearBanner(bannerEl);
    const file = fileInput.files?.[0];
    if (!file) {
      banner(bannerEl, "Choose a query frame archive first.", "error");
      return;
    }
    const ticket = sequence.next();
    try {
      const resp = await api.searchClip(file, Number(kInput.value));
      if (!sequence.isCurrent(ticket)) return; // superseded by a newer search
      renderClipResults(resultsEl, resp.results, api, showDetail);
    } catch (err) {
      if (!sequence.isCurrent(ticket)) return;
      banner(bannerEl, describe(err), "error");
    }
  });
}

export function createSketchPanel(root: HTMLElement, api: ClipseekApi): void {
  root.innerHTML = `
    <h2>Search by motion sketch</h2>
    <canvas width="300" height="300" class="sketch-canvas"></canvas>
    <div>
      <button type="button" class="sketch-submit">Search</button>
      <button type="button" class="sketch-clear">Clear</button>
    </div>
    <p class="banner" hidden></p>
    <div class="results"></div>
  `;
  const canvas = root.querySelector<HTMLCanvasElement>("canvas")!;
  const submit = root.querySelector<HTMLButtonElement>(".sketch-submit")!;
  const clear = root.querySelector<HTMLButtonElement>(".sketch-clear")!;
  const bannerEl = root.querySelector<HTMLElement>(".banner")!;
  const resultsEl = root.querySelector<HTMLElement>(".results")!;
  const pad = new SketchPad(canvas);
  const sequence = new RequestSequence();

  clear.addEventListener("click", () => {
    pad.clear();
    clearBanner(bannerEl);
  });

  submit.addEventListener("click", async () => {
    clearBanner(bannerEl);
    const payload = pad.payload();
    if (!payload) {
      banner(bannerEl, "Draw a stroke with at least two points first.", "error");
      return; // no request for an unsubmittable sketch
    }
    const ticket = sequence.next();
    try {
      const resp = await api.searchMotion(payload.points);
      if (!sequence.isCurrent(ticket)) return;
      renderMotionResults(resultsEl, resp.results);
      // the drawn stroke deliberately stays on the canvas for comparison
    } catch (err) {
      if (!sequence.isCurrent(ticket)) return;
      banner(bannerEl, describe(err), "error");
    }
  });
}
