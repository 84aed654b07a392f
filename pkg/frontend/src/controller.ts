import { ApiClient, ApiError } from "./api.js";
import { EditQueue } from "./edits.js";
import { GraphStore } from "./store.js";
import type { EditAction, QueryControls } from "./types.js";

export type Notice = { kind: "info" | "error"; text: string };

/**
 * View state and the moves the explorer supports: search a term into a
 * fresh map, expand nodes, queue relation corrections, flush them, reload
 * the map from the server. Server error codes surface verbatim as notices;
 * a failed call leaves the graph unchanged.
 */
export class ExplorerController {
  readonly store = new GraphStore();
  readonly edits: EditQueue;
  modelId: string | null = null;
  controls: QueryControls = { term: "", topn: 10, threshold: 0.55, depth: 1 };
  lastNotice: Notice | null = null;
  private listeners: (() => void)[] = [];

  constructor(private readonly api: ApiClient, author?: string) {
    this.edits = new EditQueue(this.store, author);
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  /** Force a redraw after direct store mutations (e.g. display threshold). */
  touch(): void {
    this.changed();
  }

  private changed(): void {
    for (const listener of this.listeners) listener();
  }

  private notify(kind: Notice["kind"], text: string): void {
    this.lastNotice = { kind, text };
    this.changed();
  }

  private noticeFrom(error: unknown): void {
    if (error instanceof ApiError) {
      this.notify("error", error.code);
    } else {
      this.notify("error", String(error));
    }
  }

  async search(term?: string): Promise<boolean> {
    if (this.modelId === null) {
      this.notify("error", "no model selected");
      return false;
    }
    const query = (term ?? this.controls.term).trim();
    if (!query) {
      this.notify("error", "empty query term");
      return false;
    }
    this.controls.term = query;
    try {
      const map = await this.api.graph(
        this.modelId,
        query.split(/[\s,]+/).filter(Boolean),
        this.controls.topn,
        this.controls.threshold,
        this.controls.depth,
      );
      this.store.loadMap(map);
      this.edits.discard();
      this.notify("info", `${this.store.nodeCount()} nodes, ${this.store.edgeCount()} edges`);
      return true;
    } catch (error) {
      this.noticeFrom(error); // graph stays as it was
      return false;
    }
  }

  /** Map of the terms found in a pasted document, loaded as the current map. */
  async documentMap(text: string): Promise<boolean> {
    if (this.modelId === null) {
      this.notify("error", "no model selected");
      return false;
    }
    if (!text.trim()) {
      this.notify("error", "empty document");
      return false;
    }
    try {
      const map = await this.api.documentGraph(this.modelId, text, this.controls.threshold);
      this.store.loadMap(map);
      this.edits.discard();
      this.notify(
        "info",
        `document map: ${this.store.nodeCount()} terms, ${this.store.edgeCount()} edges`,
      );
      return true;
    } catch (error) {
      this.noticeFrom(error);
      return false;
    }
  }

  /** Expand one rendered node by its nearest terms; returns nodes added. */
  async expand(nodeId: string): Promise<number> {
    if (this.modelId === null || !this.store.hasNode(nodeId)) {
      this.notify("error", "node not rendered");
      return 0;
    }
    try {
      const response = await this.api.neighbors(this.modelId, nodeId, this.controls.topn);
      if (response.neighbors.length === 0) {
        this.notify("info", `no neighbors for ${nodeId}`);
        return 0;
      }
      const added = this.store.mergeNeighbors(nodeId, response.neighbors);
      this.notify("info", `expanded ${nodeId}: ${added} new nodes`);
      return added;
    } catch (error) {
      this.noticeFrom(error);
      return 0;
    }
  }

  annotateEdge(action: EditAction, source: string, target: string, label?: string): void {
    this.edits.enqueue(action, source, target, label);
    this.changed();
  }

  /** Post queued edits in order; on failure the queue stays for retry. */
  async flush(): Promise<boolean> {
    if (this.edits.length === 0) return true; // no request issued
    if (this.store.mapId === null) {
      this.notify("error", "map has no server id");
      return false;
    }
    try {
      const accepted = await this.edits.flush(this.api, this.store.mapId);
      this.notify("info", `${accepted} edits saved`);
      return true;
    } catch (error) {
      this.noticeFrom(error);
      return false;
    }
  }

  /** Replace local state with the server's folded view of the map. */
  async reload(): Promise<void> {
    if (this.store.mapId === null) return;
    const map = await this.api.map(this.store.mapId);
    this.store.loadMap(map);
    this.changed();
  }
}
