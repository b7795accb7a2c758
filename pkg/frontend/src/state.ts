/**
 * Client-side mirror of one board.
 *
 * The mirror never invents domain state: confirmed entries come straight
 * from server documents, optimistic entries are marked pending and must be
 * confirmed with the server's document or rolled back on rejection.
 */

import type { BoardDoc, CharacterDoc, KindDoc, NodeDoc } from "./api.js";

export interface NodeView {
  id: string;
  kind: KindDoc;
  x: number;
  y: number;
  label: string;
  pending: boolean;
}

export interface EdgeView {
  id: string;
  source: string;
  target: string;
}

export interface Viewport {
  x: number;
  y: number;
  scale: number;
}

export function kindLabel(kind: KindDoc, characters: Map<string, CharacterDoc>): string {
  if (kind.type === "character_ref") {
    return characters.get(kind.character_id ?? "")?.name ?? "?";
  }
  return kind.label ?? "?";
}

let tempCounter = 0;

export class BoardMirror {
  boardId: string;
  actLabel = "";
  nodes = new Map<string, NodeView>();
  edges = new Map<string, EdgeView>();
  eventOrder: string[] = [];
  sceneryDescription: string | null = null;
  selection: string | null = null;
  viewport: Viewport = { x: 0, y: 0, scale: 1 };
  private listeners = new Set<() => void>();

  constructor(
    boardId: string,
    private characters: Map<string, CharacterDoc>,
  ) {
    this.boardId = boardId;
  }

  onChange(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Full reconcile from the server document; pending entries survive. */
  applyBoard(doc: BoardDoc): void {
    this.actLabel = doc.act_label;
    this.eventOrder = [...doc.event_order];
    this.sceneryDescription = doc.scenery_description;
    const pending = [...this.nodes.values()].filter((n) => n.pending);
    this.nodes.clear();
    for (const node of doc.nodes) this.upsertNode(node);
    for (const node of pending) this.nodes.set(node.id, node);
    this.edges.clear();
    for (const edge of doc.edges) {
      this.edges.set(edge.id, { id: edge.id, source: edge.source, target: edge.target });
    }
    this.notify();
  }

  upsertNode(doc: NodeDoc): void {
    this.nodes.set(doc.id, {
      id: doc.id,
      kind: doc.kind,
      x: doc.position.x,
      y: doc.position.y,
      label: kindLabel(doc.kind, this.characters),
      pending: false,
    });
    this.notify();
  }

  /** Optimistic node shown while the create request is in flight. */
  beginNode(kind: KindDoc, x: number, y: number): string {
    const tempId = `pending-${++tempCounter}`;
    this.nodes.set(tempId, {
      id: tempId,
      kind,
      x,
      y,
      label: kindLabel(kind, this.characters),
      pending: true,
    });
    this.notify();
    return tempId;
  }

  confirmNode(tempId: string, doc: NodeDoc): void {
    this.nodes.delete(tempId);
    this.upsertNode(doc);
  }

  rollbackNode(tempId: string): void {
    this.nodes.delete(tempId);
    this.notify();
  }

  moveNode(nodeId: string, x: number, y: number): void {
    const node = this.nodes.get(nodeId);
    if (!node) return;
    node.x = x;
    node.y = y;
    this.notify();
  }

  removeNode(nodeId: string): void {
    this.nodes.delete(nodeId);
    for (const [id, edge] of [...this.edges]) {
      if (edge.source === nodeId || edge.target === nodeId) this.edges.delete(id);
    }
    this.notify();
  }

  select(nodeId: string | null): void {
    this.selection = nodeId;
    this.notify();
  }

  setViewport(viewport: Viewport): void {
    this.viewport = viewport;
    this.notify();
  }

  /** Bounding box of all nodes, for the mini-map projection. */
  worldBounds(): { minX: number; minY: number; maxX: number; maxY: number } {
    const xs = [...this.nodes.values()].map((n) => n.x);
    const ys = [...this.nodes.values()].map((n) => n.y);
    if (xs.length === 0) return { minX: 0, minY: 0, maxX: 800, maxY: 600 };
    return {
      minX: Math.min(...xs) - 80,
      minY: Math.min(...ys) - 60,
      maxX: Math.max(...xs) + 120,
      maxY: Math.max(...ys) + 80,
    };
  }
}
