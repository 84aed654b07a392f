/** Mirrors of the /api/v1 JSON contracts (graph schema v1). */

export interface GraphNode {
  id: string;
  label: string;
  pos: string | null;
  freq: number | null;
}

export interface GraphEdge {
  source: string;
  target: string;
  /** Cosine similarity from the server; null for curator-added edges. */
  weight: number | null;
  /** Relation label attached by a knowledge-engineer edit. */
  relation?: string;
}

export interface ServerMap {
  id?: string;
  schema: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
  params: Record<string, unknown>;
}

export interface NeighborHit {
  term: string;
  similarity: number;
}

export type EditAction = "relabel" | "delete" | "add";

export interface MapEdit {
  edge: { source: string; target: string };
  action: EditAction;
  relation_label?: string;
  author?: string;
}

export interface QueryControls {
  term: string;
  topn: number;
  threshold: number;
  depth: number;
}

export interface ApiErrorBody {
  error: { code: string; message: string; [key: string]: unknown };
}
