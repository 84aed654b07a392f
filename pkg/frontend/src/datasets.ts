import { ApiClient, ApiError } from "./api.js";

/**
 * Minimal dataset management: list corpora with their annotation status,
 * upload a new corpus from pasted text, and trigger annotation jobs with
 * status polling.
 */
export class DatasetsPanel {
  constructor(
    private readonly api: ApiClient,
    private readonly listEl: HTMLElement,
    private readonly notify: (kind: "info" | "error", text: string) => void,
  ) {}

  async refresh(): Promise<void> {
    try {
      const { corpora } = await this.api.listCorpora();
      this.listEl.replaceChildren();
      if (corpora.length === 0) {
        this.listEl.textContent = "no corpora yet";
        return;
      }
      for (const corpus of corpora) {
        const row = document.createElement("div");
        row.className = "corpus-row";
        const label = document.createElement("span");
        label.textContent = `${corpus.id} — ${corpus.documents} docs — ${corpus.status}`;
        row.append(label);
        const button = document.createElement("button");
        button.type = "button";
        button.textContent = "annotate";
        button.addEventListener("click", () => void this.annotate(corpus.id, button));
        row.append(button);
        this.listEl.append(row);
      }
    } catch (error) {
      this.notify("error", error instanceof ApiError ? error.code : String(error));
    }
  }

  async upload(corpusId: string, text: string): Promise<void> {
    if (!corpusId.trim() || !text.trim()) {
      this.notify("error", "corpus id and text are required");
      return;
    }
    try {
      const created = await this.api.createCorpus(corpusId.trim(), [{ text }]);
      this.notify("info", `corpus ${created.id} created (${created.document_count} docs)`);
      await this.refresh();
    } catch (error) {
      this.notify("error", error instanceof ApiError ? error.code : String(error));
    }
  }

  private async annotate(corpusId: string, button: HTMLButtonElement): Promise<void> {
    button.disabled = true;
    try {
      const { job_id } = await this.api.annotate(corpusId);
      this.notify("info", `annotation of ${corpusId} queued`);
      await this.poll(job_id);
      await this.refresh();
    } catch (error) {
      this.notify("error", error instanceof ApiError ? error.code : String(error));
    } finally {
      button.disabled = false;
    }
  }

  private async poll(jobId: string): Promise<void> {
    for (let attempt = 0; attempt < 600; attempt += 1) {
      const job = await this.api.job(jobId);
      if (job.status === "done") {
        this.notify("info", `annotated: ${job.result_id}`);
        return;
      }
      if (job.status === "failed") {
        this.notify("error", job.error ?? "annotation failed");
        return;
      }
      await new Promise((resolve) => setTimeout(resolve, 500));
    }
    this.notify("error", "annotation timed out");
  }
}
