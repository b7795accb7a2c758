/**
 * The storyboard canvas: SVG nodes and edges with drag-to-move, a link
 * gesture between nodes, pan/zoom, and a mini-map projection.
 *
 * Server acceptance is the source of truth. Dropped elements render as
 * pending until the create call confirms them; rejected links surface the
 * server's explanation right where the user tried to connect.
 */

import { ApiError, StoryloomApi } from "./api.js";
import type { KindDoc } from "./api.js";
import { BoardMirror } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_W = 120;
const NODE_H = 40;

export interface Rect {
  left: number;
  top: number;
  width: number;
  height: number;
}

export interface CanvasOptions {
  api: StoryloomApi;
  projectId: string;
  mirror: BoardMirror;
  /** Inline notice sink (errors, link rejections). */
  onNotice: (message: string, kind: "error" | "info") => void;
  /** Overridable for tests; defaults to getBoundingClientRect. */
  rectOf?: (el: Element) => Rect;
}

export class CanvasController {
  readonly svg: SVGSVGElement;
  readonly miniMap: SVGSVGElement;
  private world: SVGGElement;
  private edgeLayer: SVGGElement;
  private nodeLayer: SVGGElement;
  private linkPreview: SVGLineElement;
  private tooltip: HTMLDivElement;
  private linkSource: string | null = null;
  private dragNode: { id: string; dx: number; dy: number } | null = null;
  private panning: { startX: number; startY: number; vx: number; vy: number } | null = null;
  private rectOf: (el: Element) => Rect;

  constructor(
    readonly container: HTMLElement,
    private options: CanvasOptions,
  ) {
    this.rectOf = options.rectOf ?? ((el) => el.getBoundingClientRect());
    container.classList.add("canvas-wrap");

    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.classList.add("board-canvas");
    const bg = document.createElementNS(SVG_NS, "rect");
    bg.classList.add("canvas-bg");
    bg.setAttribute("width", "100%");
    bg.setAttribute("height", "100%");
    this.svg.appendChild(bg);
    this.world = document.createElementNS(SVG_NS, "g");
    this.world.classList.add("world");
    this.edgeLayer = document.createElementNS(SVG_NS, "g");
    this.nodeLayer = document.createElementNS(SVG_NS, "g");
    this.linkPreview = document.createElementNS(SVG_NS, "line");
    this.linkPreview.classList.add("link-preview");
    this.linkPreview.setAttribute("visibility", "hidden");
    this.world.append(this.edgeLayer, this.nodeLayer, this.linkPreview);
    this.svg.appendChild(this.world);

    this.miniMap = document.createElementNS(SVG_NS, "svg");
    this.miniMap.classList.add("mini-map");
    this.miniMap.setAttribute("viewBox", "0 0 160 120");

    this.tooltip = document.createElement("div");
    this.tooltip.className = "canvas-tooltip";
    this.tooltip.hidden = true;

    container.append(this.svg, this.miniMap, this.tooltip);
    this.bindEvents();
    this.options.mirror.onChange(() => this.render());
    this.render();
  }

  // --- coordinates ---------------------------------------------------------

  toWorld(clientX: number, clientY: number): { x: number; y: number } {
    const rect = this.rectOf(this.svg);
    const { x, y, scale } = this.options.mirror.viewport;
    return {
      x: (clientX - rect.left) / scale + x,
      y: (clientY - rect.top) / scale + y,
    };
  }

  // --- element drop --------------------------------------------------------

  /**
   * Drop a palette element at a client position: render a pending node,
   * create it through the API, then reconcile or roll back.
   */
  async dropElement(kind: KindDoc, clientX: number, clientY: number): Promise<string | null> {
    const point = this.toWorld(clientX, clientY);
    const mirror = this.options.mirror;
    const tempId = mirror.beginNode(kind, point.x, point.y);
    try {
      const doc = await this.options.api.createNode(
        this.options.projectId,
        mirror.boardId,
        kind,
        point,
      );
      mirror.confirmNode(tempId, doc);
      return doc.id;
    } catch (error) {
      mirror.rollbackNode(tempId);
      const message = error instanceof ApiError ? error.message : String(error);
      this.options.onNotice(message, "error");
      return null;
    }
  }

  // --- linking ---------------------------------------------------------------

  beginLink(sourceId: string): void {
    this.linkSource = sourceId;
    this.linkPreview.setAttribute("visibility", "visible");
  }

  /** Finish a link gesture; the server decides whether the edge is legal. */
  async completeLink(targetId: string): Promise<boolean> {
    const sourceId = this.linkSource;
    this.cancelLink();
    if (!sourceId || sourceId === targetId) return false;
    const mirror = this.options.mirror;
    try {
      const doc = await this.options.api.createEdge(
        this.options.projectId,
        mirror.boardId,
        sourceId,
        targetId,
      );
      mirror.edges.set(doc.id, { id: doc.id, source: doc.source, target: doc.target });
      this.render();
      return true;
    } catch (error) {
      const message =
        error instanceof ApiError && error.code === "illegal_endpoints"
          ? "Links join a character with an action or relationship - try connecting a character node to a connector node."
          : error instanceof ApiError
            ? error.message
            : String(error);
      this.showTooltipAt(targetId, message);
      this.options.onNotice(message, "error");
      return false;
    }
  }

  cancelLink(): void {
    this.linkSource = null;
    this.linkPreview.setAttribute("visibility", "hidden");
  }

  private showTooltipAt(nodeId: string, message: string): void {
    const node = this.options.mirror.nodes.get(nodeId);
    this.tooltip.textContent = message;
    this.tooltip.hidden = false;
    if (node) {
      const { x, y, scale } = this.options.mirror.viewport;
      this.tooltip.style.left = `${(node.x - x) * scale + NODE_W / 2}px`;
      this.tooltip.style.top = `${(node.y - y) * scale + NODE_H + 6}px`;
    }
    setTimeout(() => {
      this.tooltip.hidden = true;
    }, 4000);
  }

  // --- mouse interaction -------------------------------------------------------

  private bindEvents(): void {
    this.svg.addEventListener("mousedown", (event) => {
      const target = event.target as Element;
      const port = target.closest(".port");
      const nodeEl = target.closest(".node");
      if (port && nodeEl) {
        this.beginLink(nodeEl.getAttribute("data-node-id")!);
        event.preventDefault();
        return;
      }
      if (nodeEl) {
        const id = nodeEl.getAttribute("data-node-id")!;
        const node = this.options.mirror.nodes.get(id);
        if (!node) return;
        const point = this.toWorld(event.clientX, event.clientY);
        this.dragNode = { id, dx: point.x - node.x, dy: point.y - node.y };
        this.options.mirror.select(id);
        return;
      }
      const viewport = this.options.mirror.viewport;
      this.panning = {
        startX: event.clientX,
        startY: event.clientY,
        vx: viewport.x,
        vy: viewport.y,
      };
      this.options.mirror.select(null);
    });

    this.svg.addEventListener("mousemove", (event) => {
      if (this.linkSource) {
        const source = this.options.mirror.nodes.get(this.linkSource);
        if (source) {
          const point = this.toWorld(event.clientX, event.clientY);
          this.linkPreview.setAttribute("x1", String(source.x + NODE_W / 2));
          this.linkPreview.setAttribute("y1", String(source.y + NODE_H / 2));
          this.linkPreview.setAttribute("x2", String(point.x));
          this.linkPreview.setAttribute("y2", String(point.y));
        }
        return;
      }
      if (this.dragNode) {
        const point = this.toWorld(event.clientX, event.clientY);
        this.options.mirror.moveNode(
          this.dragNode.id,
          point.x - this.dragNode.dx,
          point.y - this.dragNode.dy,
        );
        return;
      }
      if (this.panning) {
        const { startX, startY, vx, vy } = this.panning;
        const scale = this.options.mirror.viewport.scale;
        this.options.mirror.setViewport({
          x: vx - (event.clientX - startX) / scale,
          y: vy - (event.clientY - startY) / scale,
          scale,
        });
      }
    });

    this.svg.addEventListener("mouseup", (event) => {
      if (this.linkSource) {
        const nodeEl = (event.target as Element).closest(".node");
        if (nodeEl) {
          void this.completeLink(nodeEl.getAttribute("data-node-id")!);
        } else {
          this.cancelLink();
        }
      }
      if (this.dragNode) {
        const node = this.options.mirror.nodes.get(this.dragNode.id);
        if (node && !node.pending) {
          void this.options.api
            .moveNode(this.options.projectId, this.options.mirror.boardId, node.id, {
              x: node.x,
              y: node.y,
            })
            .catch(() => this.options.onNotice("Could not save the node position.", "error"));
        }
        this.dragNode = null;
      }
      this.panning = null;
    });

    this.svg.addEventListener("wheel", (event) => {
      event.preventDefault();
      const viewport = this.options.mirror.viewport;
      const factor = event.deltaY < 0 ? 1.1 : 1 / 1.1;
      const scale = Math.min(2.5, Math.max(0.25, viewport.scale * factor));
      const anchor = this.toWorld(event.clientX, event.clientY);
      const rect = this.rectOf(this.svg);
      this.options.mirror.setViewport({
        x: anchor.x - (event.clientX - rect.left) / scale,
        y: anchor.y - (event.clientY - rect.top) / scale,
        scale,
      });
    });

    this.miniMap.addEventListener("mousedown", (event) => {
      const bounds = this.options.mirror.worldBounds();
      const rect = this.rectOf(this.miniMap);
      const scaleX = (bounds.maxX - bounds.minX) / 160;
      const scaleY = (bounds.maxY - bounds.minY) / 120;
      const worldX = bounds.minX + (event.clientX - rect.left) * scaleX;
      const worldY = bounds.minY + (event.clientY - rect.top) * scaleY;
      const viewport = this.options.mirror.viewport;
      const view = this.visibleWorldSize();
      this.options.mirror.setViewport({
        x: worldX - view.width / 2,
        y: worldY - view.height / 2,
        scale: viewport.scale,
      });
    });
  }

  private visibleWorldSize(): { width: number; height: number } {
    const rect = this.rectOf(this.svg);
    const scale = this.options.mirror.viewport.scale;
    return {
      width: (rect.width || 800) / scale,
      height: (rect.height || 600) / scale,
    };
  }

  // --- rendering ------------------------------------------------------------------

  render(): void {
    const mirror = this.options.mirror;
    const { x, y, scale } = mirror.viewport;
    this.world.setAttribute("transform", `scale(${scale}) translate(${-x} ${-y})`);

    this.nodeLayer.textContent = "";
    for (const node of mirror.nodes.values()) {
      const group = document.createElementNS(SVG_NS, "g");
      group.classList.add("node", `kind-${node.kind.type}`);
      if (node.pending) group.classList.add("pending");
      if (mirror.selection === node.id) group.classList.add("selected");
      group.setAttribute("data-node-id", node.id);
      group.setAttribute("transform", `translate(${node.x} ${node.y})`);
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("width", String(NODE_W));
      rect.setAttribute("height", String(NODE_H));
      rect.setAttribute("rx", "8");
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(NODE_W / 2));
      text.setAttribute("y", String(NODE_H / 2 + 4));
      text.setAttribute("text-anchor", "middle");
      text.textContent = node.label;
      const port = document.createElementNS(SVG_NS, "circle");
      port.classList.add("port");
      port.setAttribute("cx", String(NODE_W));
      port.setAttribute("cy", String(NODE_H / 2));
      port.setAttribute("r", "7");
      group.append(rect, text, port);
      this.nodeLayer.appendChild(group);
    }

    this.edgeLayer.textContent = "";
    for (const edge of mirror.edges.values()) {
      const source = mirror.nodes.get(edge.source);
      const target = mirror.nodes.get(edge.target);
      if (!source || !target) continue;
      const line = document.createElementNS(SVG_NS, "line");
      line.classList.add("edge");
      line.setAttribute("data-edge-id", edge.id);
      line.setAttribute("x1", String(source.x + NODE_W / 2));
      line.setAttribute("y1", String(source.y + NODE_H / 2));
      line.setAttribute("x2", String(target.x + NODE_W / 2));
      line.setAttribute("y2", String(target.y + NODE_H / 2));
      line.setAttribute("marker-end", "url(#arrow)");
      this.edgeLayer.appendChild(line);
    }

    this.renderMiniMap();
  }

  private renderMiniMap(): void {
    const mirror = this.options.mirror;
    const bounds = mirror.worldBounds();
    const scaleX = 160 / (bounds.maxX - bounds.minX);
    const scaleY = 120 / (bounds.maxY - bounds.minY);
    this.miniMap.textContent = "";
    const bg = document.createElementNS(SVG_NS, "rect");
    bg.classList.add("mini-bg");
    bg.setAttribute("width", "160");
    bg.setAttribute("height", "120");
    this.miniMap.appendChild(bg);
    for (const node of mirror.nodes.values()) {
      const dot = document.createElementNS(SVG_NS, "rect");
      dot.classList.add("mini-node", `kind-${node.kind.type}`);
      dot.setAttribute("x", String((node.x - bounds.minX) * scaleX));
      dot.setAttribute("y", String((node.y - bounds.minY) * scaleY));
      dot.setAttribute("width", "8");
      dot.setAttribute("height", "4");
      this.miniMap.appendChild(dot);
    }
    const view = this.visibleWorldSize();
    const viewport = mirror.viewport;
    const frame = document.createElementNS(SVG_NS, "rect");
    frame.classList.add("mini-viewport");
    frame.setAttribute("x", String((viewport.x - bounds.minX) * scaleX));
    frame.setAttribute("y", String((viewport.y - bounds.minY) * scaleY));
    frame.setAttribute("width", String(view.width * scaleX));
    frame.setAttribute("height", String(view.height * scaleY));
    this.miniMap.appendChild(frame);
  }
}
