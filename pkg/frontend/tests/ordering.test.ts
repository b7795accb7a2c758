import { describe, expect, it } from "vitest";

import { StoryloomApi } from "../src/api.js";
import { OrderingTab } from "../src/ordering.js";
import { FakeBackend } from "./fake-backend.js";

function setup() {
  const backend = new FakeBackend();
  const api = new StoryloomApi("/api/v1", backend.fetch);
  const ava = backend.addCharacter("Ava");
  const brin = backend.addCharacter("Brin");
  const board = backend.addBoard();
  const na = backend.addNode(board, { type: "character_ref", character_id: ava.id });
  const nb = backend.addNode(board, { type: "character_ref", character_id: brin.id });
  const met = backend.addEvent(board, na.id, "met", nb.id);
  const fought = backend.addEvent(board, nb.id, "fought", na.id);
  const notices: { message: string; kind: string }[] = [];
  const element = document.createElement("div");
  const tab = new OrderingTab(element, {
    api,
    projectId: backend.projectId,
    onNotice: (message, kind) => notices.push({ message, kind }),
  });
  return { backend, board, tab, element, notices, met, fought };
}

function itemTexts(element: HTMLElement): string[] {
  return [...element.querySelectorAll(".event-list li span")].map((el) => el.textContent ?? "");
}

describe("OrderingTab", () => {
  it("renders the board's events in order", async () => {
    const { tab, board, element } = setup();
    await tab.load(board.id);
    expect(itemTexts(element)).toEqual(["Ava met Brin", "Brin fought Ava"]);
  });

  it("persists a reorder through the event-order endpoint", async () => {
    const { tab, board, element, backend, met, fought } = setup();
    await tab.load(board.id);
    await tab.move(0, 1);
    expect(backend.boards[0].event_order).toEqual([fought.id, met.id]);
    expect(itemTexts(element)).toEqual(["Brin fought Ava", "Ava met Brin"]);
  });

  it("blocks reordering with a notice while generation runs", async () => {
    const { tab, board, backend, notices } = setup();
    backend.structure = "free";
    await tab.load(board.id);
    const api = new StoryloomApi("/api/v1", backend.fetch);
    await api.generate(backend.projectId); // leaves a running job
    await tab.move(0, 1);
    expect(notices.some((n) => /generated|blocked/i.test(n.message))).toBe(true);
    expect(backend.boards[0].event_order).toEqual([]);
  });

  it("refreshes when the server reports a stale permutation", async () => {
    const { tab, board, backend, element } = setup();
    await tab.load(board.id);
    // a third event appears behind the tab's back
    const [na, nb] = backend.boards[0].nodes;
    backend.addEvent(board, na.id, "helped", nb.id);
    await tab.move(0, 1);
    expect(itemTexts(element)).toHaveLength(3);
  });

  it("warns about incomplete connectors", async () => {
    const { tab, board, backend, element } = setup();
    backend.addNode(board, { type: "action", label: "vanished" }); // no edges
    await tab.load(board.id);
    expect(element.querySelector(".incomplete-warning")?.textContent).toMatch(/block generation/);
  });
});
