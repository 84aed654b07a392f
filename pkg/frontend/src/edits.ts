import type { ApiClient } from "./api.js";
import type { GraphStore } from "./store.js";
import type { EditAction, MapEdit } from "./types.js";

interface QueuedEdit {
  edit: MapEdit;
  /** Re-apply the optimistic local change (used on flush retry). */
  apply: () => () => void;
  /** Undo the optimistic change; set when currently applied. */
  undo: (() => void) | null;
}

/**
 * FIFO queue of knowledge-engineer edits with optimistic local application.
 *
 * Queueing an edit applies it to the store immediately. Flushing posts the
 * edits in order: entries accepted by the server leave the queue (their
 * local effect is now durable); on the first failure the remaining entries'
 * local effects are rolled back but the entries stay queued for retry.
 */
export class EditQueue {
  private queue: QueuedEdit[] = [];

  constructor(
    private readonly store: GraphStore,
    private readonly author = "knowledge-engineer",
  ) {}

  get length(): number {
    return this.queue.length;
  }

  pending(): MapEdit[] {
    return this.queue.map((entry) => entry.edit);
  }

  enqueue(action: EditAction, source: string, target: string, label?: string): void {
    const edit: MapEdit = {
      edge: { source, target },
      action,
      author: this.author,
    };
    if (label !== undefined) edit.relation_label = label;
    const apply = (): (() => void) => {
      if (action === "delete") return this.store.removeEdge(source, target);
      if (action === "relabel") return this.store.relabelEdge(source, target, label ?? "");
      return this.store.addEdge(source, target, label ?? "");
    };
    this.queue.push({ edit, apply, undo: apply() });
  }

  /**
   * Post queued edits in order. Returns the number of edits the server
   * accepted. An empty queue issues no request at all.
   */
  async flush(api: ApiClient, mapId: string): Promise<number> {
    let accepted = 0;
    while (this.queue.length > 0) {
      const entry = this.queue[0];
      if (entry.undo === null) {
        entry.undo = entry.apply(); // re-apply optimistically on retry
      }
      try {
        await api.postEdit(mapId, entry.edit);
      } catch (error) {
        for (let i = this.queue.length - 1; i >= 0; i -= 1) {
          const pendingEntry = this.queue[i];
          if (pendingEntry.undo !== null) {
            pendingEntry.undo();
            pendingEntry.undo = null;
          }
        }
        throw error;
      }
      this.queue.shift();
      accepted += 1;
    }
    return accepted;
  }

  /** Drop all pending edits, rolling back their local effects. */
  discard(): void {
    for (let i = this.queue.length - 1; i >= 0; i -= 1) {
      const entry = this.queue[i];
      if (entry.undo !== null) entry.undo();
    }
    this.queue = [];
  }
}
