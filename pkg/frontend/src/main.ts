import "./style.css";
import { ClipseekApi } from "./api";
import { createClipSearchPanel, createRegisterPanel, createSketchPanel } from "./panels";

// API base: ?api=... query parameter wins, then the build-time env value,
// then the service's default listen address.
const params = new URLSearchParams(window.location.search);
const base =
  params.get("api") ??
  (import.meta.env.VITE_CLIPSEEK_API as string | undefined) ??
  "http://127.0.0.1:8080";

const api = new ClipseekApi(base);

document.body.innerHTML = `
  <header>
    <h1>clipseek</h1>
    <p class="api-base">service: ${base}</p>
  </header>
  <main>
    <section id="register-panel" class="panel"></section>
    <section id="clip-panel" class="panel"></section>
    <section id="sketch-panel" class="panel"></section>
  </main>
`;

createRegisterPanel(document.querySelector("#register-panel")!, api);
createClipSearchPanel(document.querySelector("#clip-panel")!, api);
createSketchPanel(document.querySelector("#sketch-panel")!, api);
