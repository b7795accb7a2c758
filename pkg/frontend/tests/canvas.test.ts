import { beforeEach, describe, expect, it } from "vitest";

import { StoryloomApi } from "../src/api.js";
import { CanvasController } from "../src/canvas.js";
import { BoardMirror } from "../src/state.js";
import { FakeBackend } from "./fake-backend.js";

const RECT = { left: 0, top: 0, width: 800, height: 600 };

function setup() {
  const backend = new FakeBackend();
  const api = new StoryloomApi("/api/v1", backend.fetch);
  const ava = backend.addCharacter("Ava");
  const brin = backend.addCharacter("Brin");
  const board = backend.addBoard();
  const characters = new Map(backend.characters.map((c) => [c.id, c]));
  const mirror = new BoardMirror(board.id, characters);
  const notices: { message: string; kind: string }[] = [];
  const container = document.createElement("div");
  document.body.appendChild(container);
  const canvas = new CanvasController(container, {
    api,
    projectId: backend.projectId,
    mirror,
    onNotice: (message, kind) => notices.push({ message, kind }),
    rectOf: () => RECT,
  });
  mirror.applyBoard(board);
  return { backend, api, board, mirror, canvas, notices, container, ava, brin };
}

describe("CanvasController", () => {
  beforeEach(() => {
    document.body.textContent = "";
  });

  it("dropping an element creates a server-confirmed node at the drop point", async () => {
    const { backend, canvas, mirror, container, ava } = setup();
    const promise = canvas.dropElement(
      { type: "character_ref", character_id: ava.id },
      200,
      150,
    );
    // optimistic pending node is visible while the request runs
    expect(container.querySelectorAll(".node.pending")).toHaveLength(1);
    const nodeId = await promise;
    expect(nodeId).toMatch(/^n/);
    expect(container.querySelectorAll(".node.pending")).toHaveLength(0);
    const rendered = container.querySelector(`[data-node-id="${nodeId}"]`);
    expect(rendered).not.toBeNull();
    // confirmed by the server, present in its document
    expect(backend.boards[0].nodes.map((n) => n.id)).toContain(nodeId);
    expect(mirror.nodes.get(nodeId!)?.pending).toBe(false);
    expect(backend.boards[0].nodes[0].position).toEqual({ x: 200, y: 150 });
  });

  it("rolls back and explains a rejected drop (empty custom label)", async () => {
    const { canvas, container, notices, backend } = setup();
    const nodeId = await canvas.dropElement(
      { type: "action", label: "  ", is_custom: true },
      100,
      100,
    );
    expect(nodeId).toBeNull();
    expect(container.querySelectorAll(".node")).toHaveLength(0);
    expect(backend.boards[0].nodes).toHaveLength(0);
    expect(notices.some((n) => n.kind === "error" && /non-empty/.test(n.message))).toBe(true);
  });

  it("rejected links show a visible explanation and draw nothing", async () => {
    const { canvas, container, notices, ava, brin } = setup();
    const a = await canvas.dropElement({ type: "character_ref", character_id: ava.id }, 100, 100);
    const b = await canvas.dropElement({ type: "character_ref", character_id: brin.id }, 300, 100);
    canvas.beginLink(a!);
    const linked = await canvas.completeLink(b!);
    expect(linked).toBe(false);
    expect(container.querySelectorAll(".edge")).toHaveLength(0);
    const tooltip = container.querySelector(".canvas-tooltip") as HTMLElement;
    expect(tooltip.hidden).toBe(false);
    expect(tooltip.textContent).toMatch(/character/i);
    expect(notices.some((n) => n.kind === "error")).toBe(true);
  });

  it("accepted links render an edge", async () => {
    const { canvas, container, ava } = setup();
    const a = await canvas.dropElement({ type: "character_ref", character_id: ava.id }, 100, 100);
    const act = await canvas.dropElement(
      { type: "action", label: "met", is_custom: false },
      300,
      100,
    );
    canvas.beginLink(a!);
    expect(await canvas.completeLink(act!)).toBe(true);
    const edges = container.querySelectorAll(".edge");
    expect(edges).toHaveLength(1);
  });

  it("duplicate links are rejected by the server", async () => {
    const { canvas, ava, notices } = setup();
    const a = await canvas.dropElement({ type: "character_ref", character_id: ava.id }, 100, 100);
    const act = await canvas.dropElement(
      { type: "action", label: "met", is_custom: false },
      300,
      100,
    );
    canvas.beginLink(a!);
    await canvas.completeLink(act!);
    canvas.beginLink(a!);
    expect(await canvas.completeLink(act!)).toBe(false);
    expect(notices[notices.length - 1].message).toMatch(/already exists/);
  });

  it("dragging a node persists the position through the API", async () => {
    const { backend, canvas, container, mirror, ava } = setup();
    const id = await canvas.dropElement({ type: "character_ref", character_id: ava.id }, 100, 100);
    const nodeEl = container.querySelector(`[data-node-id="${id}"] rect`) as Element;
    nodeEl.dispatchEvent(new MouseEvent("mousedown", { bubbles: true, clientX: 100, clientY: 100 }));
    canvas.svg.dispatchEvent(new MouseEvent("mousemove", { bubbles: true, clientX: 260, clientY: 180 }));
    canvas.svg.dispatchEvent(new MouseEvent("mouseup", { bubbles: true, clientX: 260, clientY: 180 }));
    expect(mirror.nodes.get(id!)?.x).toBe(260);
    await new Promise((resolve) => setTimeout(resolve, 0));
    const stored = backend.boards[0].nodes.find((n) => n.id === id);
    expect(stored?.position).toEqual({ x: 260, y: 180 });
  });

  it("renders a mini-map with node dots and a viewport frame", async () => {
    const { canvas, container, ava } = setup();
    await canvas.dropElement({ type: "character_ref", character_id: ava.id }, 120, 90);
    expect(container.querySelectorAll(".mini-map .mini-node")).toHaveLength(1);
    expect(container.querySelector(".mini-map .mini-viewport")).not.toBeNull();
  });

  it("panning moves the viewport and the world transform", () => {
    const { canvas, mirror } = setup();
    canvas.svg.dispatchEvent(new MouseEvent("mousedown", { bubbles: true, clientX: 400, clientY: 300 }));
    canvas.svg.dispatchEvent(new MouseEvent("mousemove", { bubbles: true, clientX: 350, clientY: 280 }));
    canvas.svg.dispatchEvent(new MouseEvent("mouseup", { bubbles: true, clientX: 350, clientY: 280 }));
    expect(mirror.viewport.x).toBe(50);
    expect(mirror.viewport.y).toBe(20);
    const world = canvas.svg.querySelector(".world")!;
    expect(world.getAttribute("transform")).toContain("translate(-50 -20)");
  });
});
