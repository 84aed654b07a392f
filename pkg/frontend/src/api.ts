import type { ApiErrorBody, MapEdit, NeighborHit, ServerMap } from "./types.js";

/** Error carrying the server's stable error code verbatim. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "http_error";
  let message = `${response.status}`;
  try {
    const body = (await response.json()) as ApiErrorBody;
    if (body && body.error) {
      code = body.error.code;
      message = body.error.message;
    }
  } catch {
    /* non-JSON error body: keep the status text */
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(`${this.base}/api/v1${path}`);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.base}/api/v1${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  listModels(): Promise<{ models: { id: string; vocab_size: number; dim: number }[] }> {
    return this.get("/models");
  }

  listCorpora(): Promise<{ corpora: { id: string; documents: number; status: string }[] }> {
    return this.get("/corpora");
  }

  createCorpus(
    id: string,
    documents: { text: string; id?: string }[],
  ): Promise<{ id: string; document_count: number }> {
    return this.post("/corpora", { id, documents });
  }

  annotate(corpusId: string): Promise<{ job_id: string }> {
    return this.post(`/corpora/${encodeURIComponent(corpusId)}/annotate`, {});
  }

  job(jobId: string): Promise<{
    id: string;
    kind: string;
    status: string;
    progress: number;
    result_id: string | null;
    error: string | null;
  }> {
    return this.get(`/jobs/${encodeURIComponent(jobId)}`);
  }

  documentGraph(modelId: string, text: string, threshold: number): Promise<ServerMap> {
    return this.post(`/models/${encodeURIComponent(modelId)}/document-graph`, {
      text,
      threshold,
    });
  }

  graph(
    modelId: string,
    terms: string[],
    topn: number,
    threshold: number,
    depth: number,
  ): Promise<ServerMap> {
    const params = new URLSearchParams({
      terms: terms.join(","),
      topn: String(topn),
      threshold: String(threshold),
      depth: String(depth),
    });
    return this.get(`/models/${encodeURIComponent(modelId)}/graph?${params}`);
  }

  neighbors(modelId: string, term: string, topn: number): Promise<{ neighbors: NeighborHit[] }> {
    const params = new URLSearchParams({ term, topn: String(topn) });
    return this.get(`/models/${encodeURIComponent(modelId)}/neighbors?${params}`);
  }

  map(mapId: string): Promise<ServerMap> {
    return this.get(`/maps/${encodeURIComponent(mapId)}`);
  }

  postEdit(mapId: string, edit: MapEdit): Promise<unknown> {
    return this.post(`/maps/${encodeURIComponent(mapId)}/edits`, edit);
  }
}
