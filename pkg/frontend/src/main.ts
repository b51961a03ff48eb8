import { HttpApi } from "./api.js";
import { createApp } from "./app.js";

// Entry point for the static page: ?api=<service base> and either
// ?dataset=<id> for an existing dataset or a file picked in the form below.

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:7341";
const api = new HttpApi(apiBase);
const mockFixture = params.get("mock") ?? undefined;

const rootEl = document.querySelector<HTMLElement>("#app");
if (!rootEl) throw new Error("missing #app container");

async function start(datasetId: string): Promise<void> {
  await createApp(rootEl!, api, datasetId, { mockFixture });
}

const datasetParam = params.get("dataset");
if (datasetParam) {
  void start(datasetParam);
} else {
  const form = document.createElement("form");
  form.innerHTML = `
    <label>Data file (CSV or JSON records)
      <input type="file" name="file" accept=".csv,.json" required>
    </label>
    <button type="submit">Explore</button>
  `;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = form.querySelector<HTMLInputElement>("input[name=file]");
    const file = input?.files?.[0];
    if (!file) return;
    const format = file.name.toLowerCase().endsWith(".json") ? "json-records" : "csv";
    void file.text().then(async (content) => {
      const summary = await api.uploadDataset(content, format);
      form.remove();
      await start(summary.datasetId);
    });
  });
  rootEl.appendChild(form);
}
