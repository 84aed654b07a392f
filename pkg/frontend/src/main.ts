import { ApiClient } from "./api.js";
import { ExplorerController } from "./controller.js";
import { DatasetsPanel } from "./datasets.js";
import { ForceRenderer } from "./render.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const controller = new ExplorerController(api);
  new ForceRenderer(el("graph"), controller);

  const notice = el<HTMLDivElement>("notice");
  controller.onChange(() => {
    const last = controller.lastNotice;
    notice.textContent = last ? last.text : "";
    notice.className = last ? `notice ${last.kind}` : "notice";
    el<HTMLSpanElement>("pending").textContent = String(controller.edits.length);
  });

  const modelSelect = el<HTMLSelectElement>("model");
  try {
    const { models } = await api.listModels();
    for (const model of models) {
      const option = document.createElement("option");
      option.value = model.id;
      option.textContent = `${model.id} (${model.vocab_size} terms, dim ${model.dim})`;
      modelSelect.append(option);
    }
    if (models.length > 0) controller.modelId = models[0].id;
  } catch (error) {
    notice.textContent = `cannot list models: ${error}`;
  }
  modelSelect.addEventListener("change", () => {
    controller.modelId = modelSelect.value;
  });

  const topn = el<HTMLInputElement>("topn");
  const depth = el<HTMLInputElement>("depth");
  const threshold = el<HTMLInputElement>("threshold");
  const displayThreshold = el<HTMLInputElement>("display-threshold");

  el<HTMLFormElement>("search-form").addEventListener("submit", (event) => {
    event.preventDefault();
    controller.controls.topn = Number(topn.value);
    controller.controls.depth = Number(depth.value);
    controller.controls.threshold = Number(threshold.value);
    controller.controls.term = el<HTMLInputElement>("term").value;
    void controller.search();
  });

  displayThreshold.addEventListener("input", () => {
    controller.store.displayThreshold = Number(displayThreshold.value);
    controller.touch();
  });

  el<HTMLButtonElement>("flush").addEventListener("click", () => {
    void controller.flush().then(async (ok) => {
      if (ok) await controller.reload();
    });
  });

  el<HTMLFormElement>("document-form").addEventListener("submit", (event) => {
    event.preventDefault();
    controller.controls.threshold = Number(threshold.value);
    void controller.documentMap(el<HTMLTextAreaElement>("document-text").value);
  });

  const panel = new DatasetsPanel(api, el("corpus-list"), (kind, text) => {
    notice.textContent = text;
    notice.className = `notice ${kind}`;
  });
  void panel.refresh();
  el<HTMLButtonElement>("corpus-refresh").addEventListener("click", () => void panel.refresh());
  el<HTMLFormElement>("upload-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void panel.upload(
      el<HTMLInputElement>("upload-id").value,
      el<HTMLTextAreaElement>("upload-text").value,
    );
  });
}

void boot();
